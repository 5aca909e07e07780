"""Deterministic discrete-event egress simulation.

One event loop owns all mutable state. Events are ordered by
(time, insertion sequence), every random draw comes from a named
sub-stream of the scenario seed, and the trace is a plain list of dicts,
so identical (scenario, seed, mode) inputs give byte-identical traces.

Guided users with a device detour to the display at their nearest entry
point, run the two-transaction provisioning flow (real QR symbols on the
optical path), and receive a balanced exit over the high-speed channel.
Everyone else, including those who give up on the queue, heads for the
nearest exit the moment their reaction delay lapses.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .. import qr
from ..algedonic import (
    AlgedonicVector,
    evaluate_trigger,
    sample as sample_sensor,
    update_vector,
)
from ..channel import (
    Direction,
    HsMode,
    ScanOutcome,
    begin_scan,
    present,
    send_highspeed,
)
from ..protocol import (
    Action,
    Event,
    HandshakeState,
    Phase,
    Transaction1Msg,
    Transaction2Msg,
    parse_t1,
    parse_t2,
    quantize_time,
    serialize_t1,
    serialize_t2,
    snapshot_state,
    step_handshake,
)
from ..protocol.wire import to_b36
from ..randomness import StreamRegistry, sample_distribution
from .metrics import EgressMetrics, UserOutcome
from .routing import CoordinatedAssigner, NoReachableExit
from .scenario import Scenario

COORDINATED = "coordinated"
UNCOORDINATED = "uncoordinated"
QR_VERSION = 3
QR_LEVEL = qr.EcLevel.L  # the only level whose capacity clears the 70-symbol budget


@dataclass
class _User:
    id: str
    node: str
    has_device: bool
    status: str = "idle"
    route: Optional[list[str]] = None
    route_purpose: Optional[str] = None
    assigned_exit: Optional[str] = None
    display_id: Optional[str] = None
    handshake: Optional[HandshakeState] = None
    current_txn: Optional[int] = None
    queue_joined_at: Optional[float] = None
    attempts: int = 0
    scans: int = 0
    registered: bool = False
    reneged: bool = False
    exited_at: Optional[float] = None


class Simulation:
    def __init__(self, scenario: Scenario, mode: str = COORDINATED,
                 seed: Optional[int] = None) -> None:
        if mode not in (COORDINATED, UNCOORDINATED):
            raise ValueError(f"unknown mode {mode!r}")
        self.sc = scenario
        self.mode = mode
        self.seed = scenario.seed if seed is None else seed
        self.streams = StreamRegistry(self.seed)
        self.graph = scenario.graph

        self.now = 0.0
        self._seq = 0
        self._heap: list[tuple[float, int, str, dict]] = []
        self.trace: list[dict] = []

        self.tree = scenario.build_tree()
        self._leaves = {leaf.id: leaf for leaf in self.tree.leaves()}
        self.trigger_cfg = scenario.trigger
        self.last_vector = AlgedonicVector(
            bits=(0,) * self.tree.n, updated_at=0.0)
        self._pending_vector_update: Optional[float] = None

        self.displays = {d.id: d for d in scenario.build_displays()}
        self.users = {
            u.id: _User(u.id, u.node, u.has_device) for u in scenario.users
        }
        self.node_pos = {
            n["id"]: tuple(n["pos"]) for n in scenario.raw["graph"]["nodes"]
            if "pos" in n
        }
        self.edge_busy = {key: 0 for key in self.graph.edges}
        self.edge_wait: dict[tuple[str, str], deque] = {
            key: deque() for key in self.graph.edges
        }
        self.assigner = CoordinatedAssigner(
            self.graph,
            None if scenario.penalty_factor is None else {
                e: scenario.penalty_factor for e in self.graph.exits
            },
        )
        self.alarm_time: Optional[float] = None
        self.registrations = 0
        self.counts = {"scans": 0, "scan_failures": 0, "hs_lost": 0,
                       "reneges": 0, "registered": 0}

    # -- event plumbing ----------------------------------------------------

    def _schedule(self, at: float, kind: str, **data) -> None:
        self._seq += 1
        heapq.heappush(self._heap, (at, self._seq, kind, data))

    def _emit(self, kind: str, **fields) -> None:
        self._seq += 1
        self.trace.append({"t": self.now, "seq": self._seq, "kind": kind, **fields})

    def run(self) -> tuple[list[dict], EgressMetrics]:
        for leaf in self.tree.leaves():
            self._schedule(leaf.sensor.period, "sensor_sample", leaf_id=leaf.id)
        horizon = self.sc.horizon_s
        while self._heap:
            at, _, kind, data = heapq.heappop(self._heap)
            if at > horizon:
                continue  # drain without processing past the horizon
            self.now = at
            getattr(self, f"_on_{kind}")(**data)
        return self.trace, self._metrics()

    # -- sensing, vector, trigger -------------------------------------------

    def _on_sensor_sample(self, leaf_id: str) -> None:
        leaf = self._leaves[leaf_id]
        bit = sample_sensor(leaf, self.now, self.streams.stream(f"sensor:{leaf_id}"))
        self._emit("sensor_sample", sensor=leaf_id, bit=bit)
        self._schedule(self.now + leaf.sensor.period, "sensor_sample",
                       leaf_id=leaf_id)
        if self._pending_vector_update != self.now:
            self._pending_vector_update = self.now
            self._schedule(self.now, "vector_update")

    def _on_vector_update(self) -> None:
        vector, stale = update_vector(self.tree, self.now)
        self.last_vector = vector
        self._emit("vector_update", bits=str(vector), stale=stale)
        threshold = self.trigger_cfg.threshold
        alert, self.trigger_cfg = evaluate_trigger(vector, self.trigger_cfg)
        if alert and self.alarm_time is None:
            self._emit("trigger", bits=str(vector), threshold=threshold)
            self._alarm()

    def _alarm(self) -> None:
        self.alarm_time = self.now
        self._emit("alarm_onset")
        for display_id in sorted(self.displays):
            self._present_message(self.displays[display_id], user=None)
        for user in self.users.values():
            delay = sample_distribution(
                self.sc.reaction_delay, self.streams.stream(f"reaction:{user.id}"))
            user.status = "reacting"
            self._schedule(self.now + delay, "reaction_end", user_id=user.id)

    # -- user decisions ------------------------------------------------------

    def _on_reaction_end(self, user_id: str) -> None:
        user = self.users[user_id]
        self._emit("reaction_end", user=user_id)
        if self.mode == COORDINATED and user.has_device and self.displays:
            entries = [d.entry_point for d in self.displays.values()]
            try:
                entry, _ = self.graph.nearest(user.node, entries)
            except NoReachableExit:
                self._go_unguided(user)
                return
            user.display_id = next(
                d.id for d in self.displays.values() if d.entry_point == entry
            )
            if user.node == entry:
                self._join_queue(user)
            else:
                self._start_movement(user, entry, "display")
        else:
            self._go_unguided(user)

    def _go_unguided(self, user: _User) -> None:
        exit_id, _ = self.graph.nearest(user.node, self.graph.exits)
        user.assigned_exit = exit_id
        self._emit("exit_assigned", user=user.id, exit=exit_id, policy="nearest")
        self._start_movement(user, exit_id, "exit")

    # -- display queue and the two-transaction flow ---------------------------

    def _join_queue(self, user: _User) -> None:
        display = self.displays[user.display_id]
        display.queue.append(user.id)
        user.status = "queued"
        user.queue_joined_at = self.now
        self._emit("queue_join", user=user.id, display=display.id,
                   position=len(display.queue))
        self._schedule(self.now + self.sc.patience_s, "renege_check",
                       user_id=user.id, joined_at=self.now)
        if display.in_service is None:
            self._serve_next(display)

    def _on_renege_check(self, user_id: str, joined_at: float) -> None:
        user = self.users[user_id]
        display = self.displays.get(user.display_id) if user.display_id else None
        if (display is None or user.queue_joined_at != joined_at
                or user.id not in display.queue):
            return  # already served, gone, or re-queued
        display.queue.remove(user.id)
        user.reneged = True
        self.counts["reneges"] += 1
        self._emit("renege", user=user.id, display=display.id,
                   waited_s=self.now - joined_at)
        self._go_unguided(user)

    def _serve_next(self, display) -> None:
        if display.in_service is not None or not display.queue:
            return
        user = self.users[display.queue.pop(0)]
        display.in_service = user.id
        user.status = "in_service"
        user.attempts = 0
        self._present_message(display, user)

    def _present_message(self, display, user: Optional[_User]) -> None:
        """Try to show the next message now; defer if the refresh gate holds."""
        if not display.can_present(self.now):
            kind = "T2" if user is not None and user.registered else "T1"
            self._emit("refresh_suppressed", display=display.id, msg_kind=kind)
            self._schedule(display.earliest_present(self.now), "present",
                           display_id=display.id,
                           user_id=user.id if user else None)
            return
        self._do_present(display, user)

    def _on_present(self, display_id: str, user_id: Optional[str]) -> None:
        display = self.displays[display_id]
        user = self.users[user_id] if user_id else None
        if user is not None and display.in_service != user.id:
            return  # service ended some other way in the meantime
        self._present_message(display, user)

    def _do_present(self, display, user: Optional[_User]) -> None:
        issued = quantize_time(self.now)
        txn = display.next_txn_id()
        ttl = self.sc.display_ttl(display.id)
        if user is not None and user.registered:
            kind = "T2"
            msg = Transaction2Msg(
                display_id=display.id,
                txn_id=txn,
                issued_at=issued,
                updated_state=snapshot_state(self.last_vector, issued),
                registration_token="RT" + to_b36(self.registrations),
                manifest=self.sc.manifest,
            )
            wire = serialize_t2(msg)
        else:
            kind = "T1"
            msg = Transaction1Msg(
                display_id=display.id,
                txn_id=txn,
                issued_at=issued,
                ttl=ttl,
                access=self.sc.network,
                prior_state=snapshot_state(self.last_vector, issued),
            )
            wire = serialize_t1(msg)
        matrix = qr.encode(qr.Payload.alphanumeric(wire), QR_VERSION, QR_LEVEL)
        accepted = present(display, matrix, self.now, text=wire)
        assert accepted, "presentation was scheduled inside the refresh gate"
        self._emit("present", display=display.id, txn=txn, msg_kind=kind,
                   symbols=len(wire))

        if user is None:
            return
        event = Event.DISPLAYED_T2 if kind == "T2" else Event.DISPLAYED_T1
        if user.handshake is None:
            user.handshake = HandshakeState()
        user.handshake, _ = _step(user.handshake, event, self.now,
                                  issued_at=issued, ttl=ttl)
        user.current_txn = txn
        self._schedule(issued + ttl + 1e-6, "expiry_check",
                       user_id=user.id, display_id=display.id, txn=txn)
        plan = begin_scan(
            self.node_pos.get(user.node),
            display,
            self.sc.uil,
            self.now,
            self.streams.stream(f"scan:{user.id}"),
            display_pos=self.node_pos.get(display.entry_point),
        )
        self._emit("scan_begin", user=user.id, display=display.id, txn=txn)
        self._schedule(plan.completes_at, "scan_end", user_id=user.id,
                       display_id=display.id, txn=txn, msg_kind=kind,
                       outcome=plan.outcome.value, payload=plan.payload)

    def _on_expiry_check(self, user_id: str, display_id: str, txn: int) -> None:
        user = self.users[user_id]
        if (user.current_txn != txn or user.handshake is None
                or user.handshake.phase not in
                (Phase.T1_DISPLAYED, Phase.T2_DISPLAYED)):
            return
        user.handshake, _ = _step(user.handshake, Event.TICK, self.now)
        if user.handshake.phase is Phase.EXPIRED:
            self._emit("handshake_expired", user=user_id, display=display_id,
                       txn=txn)
            self._attempt_failed(user, self.displays[display_id])

    def _on_scan_end(self, user_id: str, display_id: str, txn: int,
                     msg_kind: str, outcome: str,
                     payload: Optional[str]) -> None:
        user = self.users[user_id]
        display = self.displays[display_id]
        if user.current_txn != txn or display.in_service != user.id:
            return  # expired and restarted, or service was torn down
        self.counts["scans"] += 1
        user.scans += 1
        self._emit("scan_end", user=user_id, display=display_id, txn=txn,
                   outcome=outcome)
        if user.handshake.phase in (Phase.EXPIRED, Phase.FAILED):
            return  # expiry handler already dealt with this attempt
        if outcome != ScanOutcome.DELIVERED.value:
            self.counts["scan_failures"] += 1
            user.handshake, _ = _step(user.handshake, Event.SCAN_FAILED, self.now)
            self._attempt_failed(user, display)
            return

        if msg_kind == "T1":
            user.handshake, actions = _step(user.handshake, Event.USER_SCANNED,
                                            self.now)
            if user.handshake.phase is Phase.EXPIRED:
                self._emit("handshake_expired", user=user_id, display=display_id,
                           txn=txn)
                self._attempt_failed(user, display)
                return
            assert Action.REGISTER_USER in actions
            parse_t1(payload)  # the scanning device must understand the wire
            result = send_highspeed(self.sc.highspeed,
                                    Direction.DEVICE_TO_INFRA, self.now,
                                    self.streams.stream("highspeed"))
            if result.delivered:
                self._schedule(result.at, "hs_registered", user_id=user_id,
                               display_id=display_id)
            else:
                self.counts["hs_lost"] += 1
                self._emit("hs_lost", user=user_id, purpose="registration")
                self._schedule(result.at, "attempt_failed", user_id=user_id,
                               display_id=display_id)
        else:
            user.handshake, actions = _step(user.handshake,
                                            Event.USER_SCANNED_T2, self.now)
            if user.handshake.phase is Phase.EXPIRED:
                self._emit("handshake_expired", user=user_id, display=display_id,
                           txn=txn)
                self._attempt_failed(user, display)
                return
            assert Action.DELIVER_RESOURCES in actions
            parse_t2(payload)
            if self.sc.highspeed.mode is HsMode.TWO_WAY:
                result = send_highspeed(self.sc.highspeed,
                                        Direction.INFRA_TO_DEVICE, self.now,
                                        self.streams.stream("highspeed"))
                if result.delivered:
                    self._schedule(result.at, "hs_resources", user_id=user_id,
                                   display_id=display_id)
                else:
                    self.counts["hs_lost"] += 1
                    self._emit("hs_lost", user=user_id, purpose="resources")
                    self._schedule(result.at, "attempt_failed", user_id=user_id,
                                   display_id=display_id)
            else:
                # one-way network: the second symbol itself carries the manifest
                self._schedule(self.now, "hs_resources", user_id=user_id,
                               display_id=display_id)

    def _on_hs_registered(self, user_id: str, display_id: str) -> None:
        user = self.users[user_id]
        display = self.displays[display_id]
        if display.in_service != user.id:
            return
        user.handshake, actions = _step(user.handshake,
                                        Event.REGISTERED_ON_NETWORK, self.now)
        assert Action.DISPLAY_T2 in actions
        user.registered = True
        self.registrations += 1
        self.counts["registered"] += 1
        self._emit("register", user=user_id, display=display_id,
                   order=self.registrations)
        exit_id, score = self.assigner.assign(display.entry_point)
        user.assigned_exit = exit_id
        self._emit("exit_assigned", user=user_id, exit=exit_id,
                   policy="coordinated", score=round(score, 6))
        self._present_message(display, user)

    def _on_hs_resources(self, user_id: str, display_id: str) -> None:
        user = self.users[user_id]
        display = self.displays[display_id]
        if display.in_service != user.id:
            return
        user.handshake, _ = _step(user.handshake, Event.RESOURCES_DELIVERED,
                                  self.now)
        self._emit("resource_delivered", user=user_id,
                   manifest=list(self.sc.manifest))
        self._emit("handshake_complete", user=user_id, display=display_id)
        self._finish_service(display)
        self._start_movement(user, user.assigned_exit, "exit")

    def _on_attempt_failed(self, user_id: str, display_id: str) -> None:
        self._attempt_failed(self.users[user_id], self.displays[display_id])

    def _attempt_failed(self, user: _User, display) -> None:
        user.attempts += 1
        user.current_txn = None
        user.handshake = None if not user.registered else user.handshake
        if user.attempts < self.sc.max_scan_attempts:
            if user.registered:
                # keep the registration; retry the second transaction
                user.handshake = HandshakeState(Phase.REGISTERED)
            else:
                user.handshake = HandshakeState()
            self._present_message(display, user)
            return
        user.reneged = True
        self.counts["reneges"] += 1
        self._emit("renege", user=user.id, display=display.id,
                   waited_s=self.now - (user.queue_joined_at or self.now),
                   reason="attempts")
        self._finish_service(display)
        self._go_unguided(user)

    def _finish_service(self, display) -> None:
        user_id = display.in_service
        display.in_service = None
        if user_id is not None:
            self.users[user_id].current_txn = None
        self._serve_next(display)

    # -- movement over the capacity-constrained graph -------------------------

    def _start_movement(self, user: _User, target: str, purpose: str) -> None:
        if user.node == target:
            self._arrived(user, purpose)
            return
        user.route = self.graph.path(user.node, target)
        user.route_purpose = purpose
        user.status = "moving"
        self._request_edge(user)

    def _request_edge(self, user: _User) -> None:
        here = user.route[0]
        nxt = user.route[1]
        edge = self.graph.edges[(here, nxt) if here <= nxt else (nxt, here)]
        if self.edge_busy[edge.key] < edge.capacity:
            self.edge_busy[edge.key] += 1
            self._emit("move_start", user=user.id, frm=here, to=nxt)
            self._schedule(self.now + edge.traverse_s, "move_end",
                           user_id=user.id, frm=here, to=nxt)
        else:
            self.edge_wait[edge.key].append(user.id)
            self._emit("edge_wait", user=user.id, frm=here, to=nxt)

    def _on_move_end(self, user_id: str, frm: str, to: str) -> None:
        user = self.users[user_id]
        key = (frm, to) if frm <= to else (to, frm)
        self.edge_busy[key] -= 1
        waiting = self.edge_wait[key]
        if waiting:
            self._request_edge(self.users[waiting.popleft()])
        user.node = to
        user.route = user.route[1:]
        self._emit("move_end", user=user_id, node=to)
        if len(user.route) <= 1:
            self._arrived(user, user.route_purpose)
        else:
            self._request_edge(user)

    def _arrived(self, user: _User, purpose: str) -> None:
        user.route = None
        if purpose == "display":
            self._join_queue(user)
            return
        user.status = "exited"
        user.exited_at = self.now
        self._emit("exit", user=user.id, exit=user.node,
                   egress_s=self.now - self.alarm_time)

    # -- metrics ---------------------------------------------------------------

    def _metrics(self) -> EgressMetrics:
        per_user = []
        loads: dict[str, int] = {}
        for user in self.users.values():
            egress = (None if user.exited_at is None or self.alarm_time is None
                      else user.exited_at - self.alarm_time)
            if user.exited_at is not None:
                loads[user.node] = loads.get(user.node, 0) + 1
            per_user.append(UserOutcome(
                user=user.id,
                exit=user.node if user.exited_at is not None else None,
                egress_s=egress,
                guided=user.registered,
                reneged=user.reneged,
                scans=user.scans,
            ))
        exited = [u for u in per_user if u.egress_s is not None]
        return EgressMetrics(
            scenario=self.sc.name,
            seed=self.seed,
            mode=self.mode,
            alarm_time=self.alarm_time,
            total_users=len(self.users),
            exited=len(exited),
            makespan=max((u.egress_s for u in exited), default=None),
            counts=dict(self.counts),
            exit_loads=dict(sorted(loads.items())),
            per_user=per_user,
        )


_step = step_handshake


def run(scenario: Scenario, mode: str = COORDINATED,
        seed: Optional[int] = None) -> tuple[list[dict], EgressMetrics]:
    """Run one simulation; returns (trace records, metrics)."""
    return Simulation(scenario, mode=mode, seed=seed).run()
