"""Alert sinks and the background delivery dispatcher.

Delivery runs on its own thread behind a bounded queue (capacity 64, oldest
dropped on overflow) so a slow or failing sink can never stall the frame
loop. Each event is attempted up to 3 times per sink with exponential
backoff; exhausted retries are recorded, not raised.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from collections import deque
from dataclasses import dataclass, field

import requests

from vbsf.validation import AlertEvent

log = logging.getLogger("vbsf.alerts")

QUEUE_CAPACITY = 64
MAX_ATTEMPTS = 3


@dataclass(frozen=True)
class DeliveryRecord:
    frame_index: int
    sink: str
    success: bool
    attempts: int


class FileSink:
    """Appends one JSON object per alert to a file (JSON-lines)."""

    def __init__(self, path):
        self.path = path

    @property
    def name(self) -> str:
        return f"file:{self.path}"

    def deliver(self, event: AlertEvent) -> bool:
        with open(self.path, "a", encoding="utf-8") as f:
            f.write(json.dumps(event.to_json_dict()) + "\n")
        return True


class WebhookSink:
    """POSTs the alert JSON to a URL; any HTTP 2xx counts as delivered."""

    def __init__(self, url: str, timeout: float = 5.0):
        if "://" not in url:
            raise ValueError(f"malformed webhook url: {url!r}")
        self.url = url
        self.timeout = timeout

    @property
    def name(self) -> str:
        return f"webhook:{self.url}"

    def deliver(self, event: AlertEvent) -> bool:
        response = requests.post(
            self.url,
            json=event.to_json_dict(),
            headers={"Content-Type": "application/json"},
            timeout=self.timeout,
        )
        return 200 <= response.status_code < 300


class AlertDispatcher:
    """Background at-least-once delivery of alert events to every sink."""

    def __init__(self, sinks, backoff_base: float = 1.0, capacity: int = QUEUE_CAPACITY):
        self.sinks = list(sinks)
        self.backoff_base = backoff_base
        self.capacity = capacity
        self.records: list[DeliveryRecord] = []
        self.dropped = 0
        self._queue: deque[AlertEvent] = deque()
        self._cond = threading.Condition()
        self._closed = False
        self._thread = threading.Thread(target=self._worker, name="alert-dispatcher", daemon=True)
        self._thread.start()

    def submit(self, event: AlertEvent) -> None:
        with self._cond:
            if len(self._queue) >= self.capacity:
                self._queue.popleft()
                self.dropped += 1
                log.warning("alert queue full; dropped oldest event")
            self._queue.append(event)
            self._cond.notify()

    def close(self) -> list[DeliveryRecord]:
        """Drain the queue, stop the worker, and return delivery records."""
        with self._cond:
            self._closed = True
            self._cond.notify()
        self._thread.join()
        return self.records

    def _worker(self) -> None:
        while True:
            with self._cond:
                while not self._queue and not self._closed:
                    self._cond.wait()
                if not self._queue and self._closed:
                    return
                event = self._queue.popleft()
            for sink in self.sinks:
                self.records.append(self._deliver_with_retries(sink, event))

    def _deliver_with_retries(self, sink, event: AlertEvent) -> DeliveryRecord:
        for attempt in range(1, MAX_ATTEMPTS + 1):
            try:
                if sink.deliver(event):
                    return DeliveryRecord(event.frame_index, sink.name, True, attempt)
                log.warning("sink %s rejected alert for frame %d (attempt %d)",
                            sink.name, event.frame_index, attempt)
            except Exception as exc:
                log.warning("sink %s failed for frame %d (attempt %d): %s",
                            sink.name, event.frame_index, attempt, exc)
            if attempt < MAX_ATTEMPTS:
                time.sleep(self.backoff_base * 2 ** (attempt - 1))
        return DeliveryRecord(event.frame_index, sink.name, False, MAX_ATTEMPTS)


def file_sink(path) -> FileSink:
    return FileSink(path)


def webhook_sink(url: str, timeout: float = 5.0) -> WebhookSink:
    return WebhookSink(url, timeout=timeout)
