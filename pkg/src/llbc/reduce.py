"""Small-step execution of pending transactions.

The machine rewrites the pending list of a program; the interface never
changes. Seven rules fire on transactions:

* ``Transaction`` fuses two transactions joined by a mediating address.
* ``Pair`` splits an isolation cut against a connection into two cuts.
* ``Left``/``Right`` open a menu with the branch a selection picked,
  inlining the branch's own transactions and wiring its context to the
  menu's bound addresses.
* ``Read`` opens a replication box against a storage request, likewise
  keeping the body's in-flight transactions.
* ``Dispose`` drops a replication box, disposing its bound context.
* ``Copy`` duplicates a replication box against a contraction, renaming
  the two copies with left/right freshness marks.

A transaction joins its two sides symmetrically, so every rule matches
with the sides in either order. ``normalize`` always fires the leftmost
redex (ties broken in the rule order above), so it is a pure function of
its input. Fuel bounds the run; well-typed programs always finish within
it or the type checker was wrong.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from . import syntax as sx
from .errors import FuelExhausted, NotInLedgerForm
from .parser import render

RULE_ORDER = ("Transaction", "Pair", "Left", "Right", "Read", "Dispose", "Copy")
_PRIORITY = {name: i for i, name in enumerate(RULE_ORDER)}


@dataclass(frozen=True)
class Redex:
    """A rule match: its kind, the pending index it fires at, and, for the
    Transaction rule, the index of the second transaction involved."""

    kind: str
    pos: int
    partner: int | None = None

    def sort_key(self):
        return (self.pos, _PRIORITY[self.kind], -1 if self.partner is None else self.partner)


# ---------------------------------------------------------------------------
# Matching

def _oriented(txn: sx.Transaction):
    """Yield (box-or-left, other, flipped) in both orientations."""
    yield txn.left, txn.right, False
    yield txn.right, txn.left, True


def _choose_context(box: sx.Choose, branch: sx.Program):
    """Context binders aligned with the branch's non-principal interface,
    or None when the arities cannot line up."""
    width = len(branch.interface)
    if width == 0 or len(box.left.interface) != len(box.right.interface):
        return None
    if len(box.bound) == width:
        return box.bound[1:]
    if len(box.bound) == width - 1:
        return box.bound
    return None


def _match_local(txn: sx.Transaction) -> tuple[str, bool] | None:
    for head, other, flipped in _oriented(txn):
        match head, other:
            case (sx.Iso(), sx.Conn()):
                return ("Pair", flipped)
            case (sx.Choose(), sx.Inl()):
                if _choose_context(head, head.left) is not None:
                    return ("Left", flipped)
            case (sx.Choose(), sx.Inr()):
                if _choose_context(head, head.right) is not None:
                    return ("Right", flipped)
            case (sx.Bang(), sx.Store()):
                if len(head.bound) == len(head.body.interface) - 1:
                    return ("Read", flipped)
            case (sx.Bang(), sx.Dispose()):
                return ("Dispose", flipped)
            case (sx.Bang(), sx.Contract()):
                return ("Copy", flipped)
    return None


def _is_loop(txn: sx.Transaction) -> bool:
    return (
        isinstance(txn.left, sx.Addr)
        and isinstance(txn.right, sx.Addr)
        and txn.left.address == txn.right.address
    )


def _bare_sides(txn: sx.Transaction, address: sx.Address) -> int:
    count = 0
    if isinstance(txn.left, sx.Addr) and txn.left.address == address:
        count += 1
    if isinstance(txn.right, sx.Addr) and txn.right.address == address:
        count += 1
    return count


def _mediator_pairs(p: sx.Program):
    """Eligible (i, j) pairs for the Transaction rule.

    A mediator address must either account for both of its occurrences as
    whole sides of the two transactions, or one of the two transactions is
    a self-loop ``txn(x, x)`` being absorbed into the other. The first
    condition is what linearity gives on typed programs; the second arises
    when a spend deliberately re-uses an address for a coin that stays put.
    """
    occurrences: dict[sx.Address, int] = {}
    for address, _ in sx.surface_occurrences(p):
        occurrences[address] = occurrences.get(address, 0) + 1
    sides: dict[sx.Address, list[int]] = {}
    for i, txn in enumerate(p.pending):
        for side in (txn.left, txn.right):
            if isinstance(side, sx.Addr):
                sides.setdefault(side.address, []).append(i)
    pairs: set[tuple[int, int]] = set()
    for address, where in sides.items():
        indices = sorted(set(where))
        if len(indices) < 2:
            continue
        for a in range(len(indices)):
            for b in range(a + 1, len(indices)):
                i, j = indices[a], indices[b]
                ti, tj = p.pending[i], p.pending[j]
                loop = _is_loop(ti) or _is_loop(tj)
                exact = (
                    occurrences.get(address, 0) == 2
                    and _bare_sides(ti, address) + _bare_sides(tj, address) == 2
                )
                if loop or exact:
                    pairs.add((i, j))
    return pairs


def find_redexes(p: sx.Program) -> list[Redex]:
    """Every position where a rule can fire, in the deterministic order
    ``normalize`` uses."""
    out = []
    for i, txn in enumerate(p.pending):
        matched = _match_local(txn)
        if matched is not None:
            out.append(Redex(matched[0], i))
    for i, j in _mediator_pairs(p):
        out.append(Redex("Transaction", i, j))
    out.sort(key=Redex.sort_key)
    return out


# ---------------------------------------------------------------------------
# Stepping

@dataclass(frozen=True)
class StepEffect:
    """Unit accounting for one step: literals burned with a disposed box,
    discarded with an unselected branch, or duplicated by a copy."""

    burned: Counter = field(default_factory=Counter)
    discarded: Counter = field(default_factory=Counter)
    duplicated: Counter = field(default_factory=Counter)


def _fuse(ti: sx.Transaction, tj: sx.Transaction, address: sx.Address) -> sx.Transaction:
    def other(txn):
        if _is_loop(txn):
            return txn.left
        if isinstance(txn.left, sx.Addr) and txn.left.address == address:
            return txn.right
        return txn.left

    return sx.Transaction(other(ti), other(tj))


def _mediator_of(ti: sx.Transaction, tj: sx.Transaction) -> sx.Address | None:
    for side in (ti.left, ti.right):
        if isinstance(side, sx.Addr) and _bare_sides(tj, side.address):
            return side.address
    return None


def step_with_effect(p: sx.Program, r: Redex) -> tuple[sx.Program, StepEffect]:
    pending = list(p.pending)
    effect = StepEffect()
    if r.kind == "Transaction":
        if r.partner is None or not (0 <= r.pos < r.partner < len(pending)):
            raise ValueError(f"not a Transaction redex of {render(p)}: {r}")
        ti, tj = pending[r.pos], pending[r.partner]
        address = _mediator_of(ti, tj)
        if address is None:
            raise ValueError(f"transactions {r.pos} and {r.partner} share no mediator")
        fused = _fuse(ti, tj, address)
        pending[r.pos] = fused
        del pending[r.partner]
        return sx.Program(p.interface, tuple(pending), span=p.span), effect

    txn = pending[r.pos]
    matched = _match_local(txn)
    if matched is None or matched[0] != r.kind:
        raise ValueError(f"redex {r} does not match {render(txn)}")
    flipped = matched[1]
    head = txn.right if flipped else txn.left
    other = txn.left if flipped else txn.right

    if r.kind == "Pair":
        residue = [
            sx.Transaction(head.left, other.left),
            sx.Transaction(head.right, other.right),
        ]
    elif r.kind in ("Left", "Right"):
        branch = head.left if r.kind == "Left" else head.right
        dropped = head.right if r.kind == "Left" else head.left
        context = _choose_context(head, branch)
        residue = [sx.Transaction(branch.interface[0], other.inner)]
        residue.extend(branch.pending)
        residue.extend(
            sx.Transaction(sx.Addr(x), e)
            for x, e in zip(context, branch.interface[1:])
        )
        effect.discarded.update(sx.unit_multiset(dropped))
    elif r.kind == "Read":
        body = head.body
        residue = [sx.Transaction(body.interface[0], other.inner)]
        residue.extend(body.pending)
        residue.extend(
            sx.Transaction(sx.Addr(x), e) for x, e in zip(head.bound, body.interface[1:])
        )
    elif r.kind == "Dispose":
        residue = [sx.Transaction(sx.Addr(x), sx.Dispose()) for x in head.bound]
        effect.burned.update(sx.unit_multiset(head.body))
    elif r.kind == "Copy":
        left_box = sx.rename(head, sx.LEFT)
        right_box = sx.rename(head, sx.RIGHT)
        residue = [
            sx.Transaction(
                sx.Addr(x),
                sx.Contract(sx.Addr(x.extended(sx.LEFT)), sx.Addr(x.extended(sx.RIGHT))),
            )
            for x in head.bound
        ]
        residue.append(sx.Transaction(left_box, other.left))
        residue.append(sx.Transaction(right_box, other.right))
        effect.duplicated.update(sx.unit_multiset(head.body))
    else:
        raise ValueError(f"unknown rule {r.kind}")

    pending[r.pos : r.pos + 1] = residue
    return sx.Program(p.interface, tuple(pending), span=p.span), effect


def step(p: sx.Program, r: Redex) -> sx.Program:
    """Fire one redex. ``r`` must come from ``find_redexes(p)``."""
    return step_with_effect(p, r)[0]


# ---------------------------------------------------------------------------
# Normalization

@dataclass(frozen=True)
class TraceStep:
    index: int
    redex: Redex
    program: sx.Program

    def line(self) -> str:
        return f"{self.index} {self.redex.kind} {self.redex.pos} {render(self.program)}"


@dataclass(frozen=True)
class NormalizeResult:
    result: sx.Program
    steps: int
    trace: tuple[TraceStep, ...] | None
    burned: Counter
    discarded: Counter
    duplicated: Counter


DEFAULT_FUEL = 10**6


def normalize(
    p: sx.Program, fuel: int = DEFAULT_FUEL, *, trace: bool = False
) -> NormalizeResult:
    """Fire the leftmost redex until none remains or fuel runs out.

    Raises :class:`FuelExhausted` (carrying the last state) if the program
    does not reach a normal form within ``fuel`` steps.
    """
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    steps = 0
    lines: list[TraceStep] = []
    burned: Counter = Counter()
    discarded: Counter = Counter()
    duplicated: Counter = Counter()
    while True:
        redexes = find_redexes(p)
        if not redexes:
            return NormalizeResult(
                p, steps, tuple(lines) if trace else None, burned, discarded, duplicated
            )
        if steps >= fuel:
            raise FuelExhausted(p, steps)
        p, effect = step_with_effect(p, redexes[0])
        steps += 1
        burned.update(effect.burned)
        discarded.update(effect.discarded)
        duplicated.update(effect.duplicated)
        if trace:
            lines.append(TraceStep(steps, redexes[0], p))


# ---------------------------------------------------------------------------
# Ledger read-back

@dataclass(frozen=True)
class Ledger:
    """An address-to-currency assignment plus the units routed to disposal."""

    balances: tuple[tuple[sx.Address, tuple[tuple[str, int], ...]], ...]
    burned: tuple[tuple[str, int], ...]

    def balances_dict(self) -> dict[sx.Address, Counter]:
        return {a: Counter(dict(units)) for a, units in self.balances}

    def burned_dict(self) -> Counter:
        return Counter(dict(self.burned))

    def total_units(self) -> Counter:
        out: Counter = Counter()
        for _, units in self.balances:
            out.update(dict(units))
        out.update(dict(self.burned))
        return out

    def to_json_dict(self) -> dict:
        return {
            "balances": {
                address.render(): {unit: count for unit, count in sorted(units)}
                for address, units in self.balances
            },
            "burned": {unit: count for unit, count in sorted(self.burned)},
        }


def _unit_tree(e: sx.Expression) -> Counter | None:
    """The multiset of a pure ``*``-tree of unit literals, else None."""
    match e:
        case sx.Unit(unit):
            return Counter({unit: 1})
        case sx.Iso(left, right):
            l, r = _unit_tree(left), _unit_tree(right)
            if l is None or r is None:
                return None
            l.update(r)
            return l
    return None


def readback_ledger(p: sx.Program) -> Ledger:
    """Project a program to its ledger, when it is in ledger form.

    Every pending transaction must assign a unit tree to an address,
    dispose an address, or dispose a unit tree (burning it); transaction
    sides may come in either order. Raises :class:`NotInLedgerForm` at the
    first transaction that does not fit.
    """
    balances: dict[sx.Address, Counter] = {}
    burned: Counter = Counter()
    for i, txn in enumerate(p.pending):
        done = False
        for head, other, _flipped in _oriented(txn):
            if isinstance(head, sx.Addr):
                if isinstance(other, sx.Dispose):
                    balances.setdefault(head.address, Counter())
                    done = True
                    break
                units = _unit_tree(other)
                if units is not None:
                    balances.setdefault(head.address, Counter()).update(units)
                    done = True
                    break
            elif isinstance(head, sx.Dispose):
                units = _unit_tree(other)
                if units is not None:
                    burned.update(units)
                    done = True
                    break
        if not done:
            raise NotInLedgerForm(i, txn)
    return Ledger(
        tuple(
            (address, tuple(sorted(balances[address].items())))
            for address in sorted(balances)
        ),
        tuple(sorted(burned.items())),
    )
