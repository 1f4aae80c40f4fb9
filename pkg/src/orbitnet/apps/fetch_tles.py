import argparse
import sys
import time
from typing import List
import requests

from orbitnet.mobility.tle import TLERecord, parse_tle_text
from orbitnet.utils import get_logger


logger = get_logger(__name__)

CELESTRAK_GP_URL = "https://celestrak.org/NORAD/elements/gp.php"


def fetch_celestrak_group(group: str = "cubesat", retries: int = 3, timeout: float = 30.0) -> List[TLERecord]:
    """
    Download the current element sets of a CelesTrak group.

    :param group: CelesTrak group name
    :param retries: attempts before giving up
    :param timeout: seconds per request
    :return: parsed and checksum-validated records
    """
    for attempt in range(1, retries + 1):
        response = requests.get(CELESTRAK_GP_URL, params={"GROUP": group, "FORMAT": "tle"}, timeout=timeout)
        if response.status_code == 200:
            return parse_tle_text(response.text)
        logger.info(f"Got a {response.status_code} from CelesTrak for group {group} (attempt {attempt}/{retries})")
        time.sleep(2 ** attempt)
    raise RuntimeError(f"Could not download the {group} group from CelesTrak after {retries} attempts")


def write_tle_file(records: List[TLERecord], path: str):
    with open(path, "w") as f:
        for record in records:
            f.write(f"{record.name}\n{record.line1}\n{record.line2}\n")


def main(argv: List[str] = None) -> int:
    parser = argparse.ArgumentParser(description='''
        Download up-to-date TLEs from CelesTrak into a file usable by the cubesat scenario
        (--tle-file, or the ORBITNET_TLE_PATH environment variable).
    ''')
    parser.add_argument('--out', type=str, required=True, help='Path of the TLE file to write')
    parser.add_argument('--group', type=str, default='cubesat', help="[Optional] CelesTrak group (defaults to 'cubesat')")
    parser.add_argument('--limit', type=int, default=None, help='[Optional] Keep only the first N element sets')
    args = parser.parse_args(argv)

    print("\nCommand-line Arguments:")
    print(f"Output Path: \n\t\t\t{args.out}")
    print(f"Group: \n\t\t\t{args.group}")
    print(f"Limit: \n\t\t\t{args.limit}\n")

    try:
        records = fetch_celestrak_group(args.group)
    except (requests.RequestException, RuntimeError, ValueError) as err:
        print(f"Download failed: {err}", file=sys.stderr)
        return 2
    if args.limit is not None:
        records = records[:args.limit]
    write_tle_file(records, args.out)
    print(f"Wrote {len(records)} element sets to {args.out}")
    print("TLE fetch finished!")
    return 0


if __name__ == "__main__":
    sys.exit(main())
