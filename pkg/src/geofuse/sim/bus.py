# -*- coding: utf-8 -*- {{{
# ===----------------------------------------------------------------------===
#
#                 Component of geofuse
#
# ===----------------------------------------------------------------------===
#
# Copyright 2026 The geofuse developers
#
# Licensed under the Apache License, Version 2.0 (the "License"); you may not
# use this file except in compliance with the License. You may obtain a copy
# of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations
# under the License.
#
# ===----------------------------------------------------------------------===
# }}}

from __future__ import annotations

from collections import defaultdict
import logging
from typing import Any, Callable, Dict

from gevent.queue import Queue

__all__ = ["MessageBus", "RELATIVE_TOPIC", "relative_topic"]

_log = logging.getLogger(__name__)

RELATIVE_TOPIC = "agents/{observer}/relative/{target}"

Callback = Callable[[str, str, Dict[str, Any], Any], None]


def relative_topic(observer: int, target: int) -> str:
    return RELATIVE_TOPIC.format(observer=observer, target=target)


class MessageBus:
    """In-process topic-prefix publish/subscribe.

    Published messages wait in a queue until :meth:`drain`, which delivers them in timestamp
    order (``headers["timestamp"]``, publication order for ties) to every callback whose
    subscribed prefix starts the topic.  Callbacks are invoked as
    ``callback(sender, topic, headers, message)``.
    """

    def __init__(self):
        # d[prefix] = {callback: None}, kept in subscription order
        self._subscriptions: Dict[str, Dict[Callback, None]] = defaultdict(dict)
        self._queue = Queue()
        self._published = 0

    def subscribe(self, prefix: str, callback: Callback):
        if not callable(callback):
            raise ValueError("callback %r is not callable" % (callback, ))
        self._subscriptions[prefix][callback] = None

    def publish(self, sender: str, topic: str, headers=None, message=None):
        if headers is None:
            headers = {}
        headers.setdefault("timestamp", 0.0)
        self._queue.put_nowait((float(headers["timestamp"]), self._published, sender, topic,
                                headers, message))
        self._published += 1

    def drain(self) -> int:
        """Deliver every queued message; returns the number of callback invocations."""
        batch = []
        while not self._queue.empty():
            batch.append(self._queue.get_nowait())
        batch.sort(key=lambda item: (item[0], item[1]))

        delivered = 0
        for _, _, sender, topic, headers, message in batch:
            handled = False
            for prefix, callbacks in list(self._subscriptions.items()):
                if topic.startswith(prefix):
                    for callback in list(callbacks):
                        callback(sender, topic, headers, message)
                        delivered += 1
                        handled = True
            if not handled:
                _log.debug(f"no subscriber for {topic}")
        return delivered
