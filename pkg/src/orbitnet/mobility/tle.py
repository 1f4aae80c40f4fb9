from dataclasses import dataclass
from datetime import datetime, timezone
from typing import List, Tuple
import numpy as np
from sgp4.api import Satrec, WGS72, SGP4_ERRORS, jday

from orbitnet.errors import TLEParseError, PropagationError


@dataclass(frozen=True)
class TLERecord:
    name: str
    line1: str
    line2: str

    def __post_init__(self):
        validate_tle_line(self.line1, 1)
        validate_tle_line(self.line2, 2)

    @property
    def catalog_number(self) -> str:
        return self.line1[2:7].strip()

    @property
    def mean_motion_rev_per_day(self) -> float:
        return float(self.line2[52:63])

    def to_satrec(self) -> Satrec:
        return Satrec.twoline2rv(self.line1, self.line2, WGS72)


def tle_checksum(line: str) -> int:
    """Modulo-10 sum over the first 68 characters, digits count their value and minus signs count 1."""
    total = 0
    for char in line[:68]:
        if char.isdigit():
            total += int(char)
        elif char == "-":
            total += 1
    return total % 10


def validate_tle_line(line: str, line_number: int):
    if len(line) < 69:
        raise TLEParseError(f"TLE line {line_number} is too short ({len(line)} characters): {line!r}")
    if line[0] != str(line_number):
        raise TLEParseError(f"Expected TLE line {line_number}, got: {line!r}")
    if not line[68].isdigit() or int(line[68]) != tle_checksum(line):
        raise TLEParseError(f"Checksum mismatch on TLE line {line_number}: {line!r}")


def parse_tle_text(text: str) -> List[TLERecord]:
    """
    Parse TLE sets in the three-line format (name line followed by the two element lines).
    A set without a name line gets its catalog number as name.
    """
    lines = [line.rstrip() for line in text.splitlines() if line.strip()]
    records = []
    index = 0
    while index < len(lines):
        line = lines[index]
        if line.startswith("1 ") and index + 1 < len(lines) and lines[index + 1].startswith("2 "):
            name, line1, line2 = line[2:7].strip(), line, lines[index + 1]
            index += 2
        else:
            if index + 2 >= len(lines):
                raise TLEParseError(f"Incomplete TLE set starting at: {line!r}")
            name, line1, line2 = line, lines[index + 1], lines[index + 2]
            if name.startswith("0 "):
                name = name[2:]
            index += 3
        records.append(TLERecord(name=name.strip(), line1=line1, line2=line2))
    return records


def load_tle_file(path: str) -> List[TLERecord]:
    with open(path, "r") as f:
        records = parse_tle_text(f.read())
    if not records:
        raise TLEParseError(f"No TLE sets found in {path}")
    return records


def datetime_to_julian(moment: datetime) -> Tuple[float, float]:
    """Split Julian date (whole part, fraction) of a UTC datetime."""
    if moment.tzinfo is not None:
        moment = moment.astimezone(timezone.utc)
    seconds = moment.second + moment.microsecond * 1e-6
    return jday(moment.year, moment.month, moment.day, moment.hour, moment.minute, seconds)


def sgp4_position(tle: TLERecord, t: float, epoch: datetime = None) -> np.ndarray:
    """
    Propagate a TLE with SGP4.

    :param tle: element set
    :param t: seconds since epoch
    :param epoch: simulation epoch, None to propagate from the TLE's own epoch
    :return: TEME position relative to Earth's center in km
    """
    satellite = tle.to_satrec()
    if epoch is None:
        jd, fr = satellite.jdsatepoch, satellite.jdsatepochF
    else:
        jd, fr = datetime_to_julian(epoch)
    error, position, _ = satellite.sgp4(jd, fr + t / 86400.0)
    if error != 0:
        raise PropagationError(f"SGP4 failed for {tle.name} at t={t}: {SGP4_ERRORS.get(error, error)}")
    return np.asarray(position, dtype=float)
