from dataclasses import dataclass, asdict, fields
from typing import Iterator, List, Optional
import gzip
import json
import pandas as pd

from orbitnet.errors import MalformedLogError
from orbitnet.events import (Event, MessageEvent, SegmentEvent, LinkEvent, TimerEvent,
                             RoutingUpdateEvent, CustomEvent)


class RecordKind:
    """Record kinds that exist only in the log, next to the names of the dispatched event kinds."""
    SIMULATION_START = "SimulationStart"
    SIMULATION_END = "SimulationEnd"
    TRANSMISSION = "Transmission"
    MESSAGE_LOST = "MessageLost"
    LTP_SEGMENT_LOST = "LTPSegmentLost"


@dataclass(frozen=True)
class EventLogRecord:
    """
    One line of the run trace.
    Only the fields relevant for the record kind are set, the rest stay None and are left out of the serialized form.
    """
    time: float
    kind: str
    message_uid: Optional[int] = None
    node: Optional[int] = None
    peer: Optional[int] = None
    reason: Optional[str] = None
    size_bits: Optional[int] = None
    source: Optional[int] = None
    destination: Optional[int] = None
    created_at: Optional[float] = None
    hops: Optional[int] = None
    duration: Optional[float] = None
    session: Optional[int] = None
    segment_uid: Optional[int] = None
    tag: Optional[str] = None
    detail: Optional[str] = None

    def to_dict(self) -> dict:
        return {key: value for key, value in asdict(self).items() if value is not None}

    @staticmethod
    def from_dict(values: dict) -> "EventLogRecord":
        known = {f.name for f in fields(EventLogRecord)}
        unknown = set(values) - known
        if unknown:
            raise MalformedLogError(f"Unknown record fields: {sorted(unknown)}")
        if "time" not in values or "kind" not in values:
            raise MalformedLogError(f"Record is missing time or kind: {values}")
        return EventLogRecord(**values)

    @staticmethod
    def from_event(event: Event) -> "EventLogRecord":
        payload = event.payload
        kind = event.kind.value
        if isinstance(payload, MessageEvent):
            message = payload.message
            return EventLogRecord(time=event.time, kind=kind, message_uid=message.uid, node=payload.node,
                                  peer=payload.peer,
                                  reason=payload.reason.value if payload.reason is not None else None,
                                  size_bits=message.size_bits, source=message.source,
                                  destination=message.destination, created_at=message.created_at,
                                  hops=message.hop_count, tag=message.tag)
        if isinstance(payload, SegmentEvent):
            segment = payload.segment
            return EventLogRecord(time=event.time, kind=kind, message_uid=getattr(segment, "message_uid", None),
                                  node=payload.node, peer=payload.peer, size_bits=segment.size_bits,
                                  session=segment.session_id, segment_uid=segment.uid,
                                  detail=segment.segment_type)
        if isinstance(payload, LinkEvent):
            return EventLogRecord(time=event.time, kind=kind, node=payload.endpoint_a, peer=payload.endpoint_b)
        if isinstance(payload, TimerEvent):
            detail = payload.owner if not payload.key else f"{payload.owner}:{payload.key[0]}"
            return EventLogRecord(time=event.time, kind=kind, detail=detail)
        if isinstance(payload, RoutingUpdateEvent):
            return EventLogRecord(time=event.time, kind=kind,
                                  detail=f"up={payload.links_up},down={payload.links_down}")
        if isinstance(payload, CustomEvent):
            return EventLogRecord(time=event.time, kind=kind, detail=payload.name)
        return EventLogRecord(time=event.time, kind=kind)


class EventLog:
    """
    In-memory store of the run trace, exportable as JSON lines (gzip when the path ends with .gz) or CSV.
    """
    def __init__(self, records: List[EventLogRecord] = None):
        self._records: List[EventLogRecord] = list(records) if records is not None else []

    def append(self, record: EventLogRecord):
        self._records.append(record)

    @property
    def records(self) -> List[EventLogRecord]:
        return self._records

    def __len__(self):
        return len(self._records)

    def __iter__(self) -> Iterator[EventLogRecord]:
        return iter(self._records)

    def filter(self, kind: str = None, message_uid: int = None) -> List[EventLogRecord]:
        """
        Select records by kind and/or message uid.

        :param kind: record kind to keep (event kind name or a RecordKind value)
        :param message_uid: message uid to keep
        """
        selected = self._records
        if kind is not None:
            selected = [record for record in selected if record.kind == kind]
        if message_uid is not None:
            selected = [record for record in selected if record.message_uid == message_uid]
        return selected

    def to_lines(self) -> List[str]:
        return [json.dumps(record.to_dict(), sort_keys=True, separators=(",", ":")) for record in self._records]

    def export(self, path: str):
        """
        Write the log as JSON lines.

        :param path: output path, gzip compressed if it ends with .gz
        """
        payload = ("\n".join(self.to_lines()) + "\n").encode("utf-8") if self._records else b""
        if path.endswith(".gz"):
            # fixed mtime keeps the compressed bytes identical across runs
            with open(path, "wb") as raw, gzip.GzipFile(fileobj=raw, mode="wb", mtime=0) as compressed:
                compressed.write(payload)
        else:
            with open(path, "wb") as f:
                f.write(payload)

    @staticmethod
    def create_from_file(path: str) -> "EventLog":
        opener = gzip.open if path.endswith(".gz") else open
        records = []
        with opener(path, "rt", encoding="utf-8") as f:
            for line_number, line in enumerate(f, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    values = json.loads(line)
                except json.JSONDecodeError as err:
                    raise MalformedLogError(f"Line {line_number} of {path} is not valid JSON: {err}")
                if not isinstance(values, dict):
                    raise MalformedLogError(f"Line {line_number} of {path} is not a record object")
                records.append(EventLogRecord.from_dict(values))
        return EventLog(records)

    def to_dataframe(self) -> pd.DataFrame:
        columns = [f.name for f in fields(EventLogRecord)]
        return pd.DataFrame([asdict(record) for record in self._records], columns=columns)

    def export_to_csv(self, path: str):
        self.to_dataframe().to_csv(path, index=False)
