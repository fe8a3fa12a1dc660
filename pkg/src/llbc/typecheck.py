"""Linear type checking for block-chain state programs.

``check`` decides whether a program can be assigned the declared interface
types under the typing rules: one axiom per address pair, a literal axiom
for currency units, tensor/par for isolation/connection, with/plus for
menus and selections, storage/disposal/contraction/replication for the
exponentials, and a cut rule typing each pending transaction by a pair of
dual types.

Interface types are mandatory input; nothing is inferred about them. What
a pending transaction cuts, however, carries no annotation, so the checker
threads types through the program: each address has exactly two
occurrences (or one, for an open interface port) and the two are forced to
dual types. Holes the flow cannot pin down on its own, such as the absent
summand of a selection or the body type of a bare disposal, become
unification variables; anything still undetermined once the whole program
has been visited is filled with the default currency atom, in creation
order, so checking is deterministic and total on meaningful scripts.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import syntax as sx
from .errors import (
    BranchContextMismatchError,
    NonLinearAddressError,
    PromotionContextError,
    TypeCheckError,
    TypeMismatchError,
)
from .parser import render

DEFAULT_UNIT = "satoshi"


# ---------------------------------------------------------------------------
# Derivations

@dataclass(frozen=True)
class Derivation:
    """One rule application: its label, subject, assigned type, premises."""

    rule: str
    subject: str
    type: sx.LinearType | None
    children: tuple["Derivation", ...] = ()


@dataclass(frozen=True)
class TypedJudgment:
    program: sx.Program
    interface_types: tuple[sx.LinearType, ...]
    derivation: Derivation


# ---------------------------------------------------------------------------
# Unification

@dataclass(frozen=True)
class _TVar(sx.LinearType):
    """A type not yet determined by the flow. Internal to checking."""

    id: int
    negated: bool = False


def _dual(t: sx.LinearType) -> sx.LinearType:
    if isinstance(t, _TVar):
        return _TVar(t.id, not t.negated)
    match t:
        case sx.Atom(unit, negated):
            return sx.Atom(unit, not negated)
        case sx.Tensor(left, right):
            return sx.Par(_dual(left), _dual(right))
        case sx.Par(left, right):
            return sx.Tensor(_dual(left), _dual(right))
        case sx.With(left, right):
            return sx.Plus(_dual(left), _dual(right))
        case sx.Plus(left, right):
            return sx.With(_dual(left), _dual(right))
        case sx.OfCourse(body):
            return sx.WhyNot(_dual(body))
        case sx.WhyNot(body):
            return sx.OfCourse(_dual(body))
    raise TypeError(f"not a LinearType: {t!r}")


class _UnifyError(Exception):
    pass


class _Unifier:
    def __init__(self, default_unit: str):
        self.subst: dict[int, sx.LinearType] = {}
        self.created: list[int] = []
        self.default_unit = default_unit
        self._next = 0

    def fresh(self) -> _TVar:
        self._next += 1
        self.created.append(self._next)
        return _TVar(self._next)

    def resolve(self, t: sx.LinearType) -> sx.LinearType:
        if isinstance(t, _TVar):
            bound = self.subst.get(t.id)
            if bound is None:
                return t
            resolved = self.resolve(bound)
            return _dual(resolved) if t.negated else resolved
        match t:
            case sx.Atom():
                return t
            case sx.Tensor(l, r):
                return sx.Tensor(self.resolve(l), self.resolve(r))
            case sx.Par(l, r):
                return sx.Par(self.resolve(l), self.resolve(r))
            case sx.With(l, r):
                return sx.With(self.resolve(l), self.resolve(r))
            case sx.Plus(l, r):
                return sx.Plus(self.resolve(l), self.resolve(r))
            case sx.OfCourse(b):
                return sx.OfCourse(self.resolve(b))
            case sx.WhyNot(b):
                return sx.WhyNot(self.resolve(b))
        raise TypeError(f"not a LinearType: {t!r}")

    def _occurs(self, var_id: int, t: sx.LinearType) -> bool:
        if isinstance(t, _TVar):
            return t.id == var_id
        match t:
            case sx.Atom():
                return False
            case sx.Tensor(l, r) | sx.Par(l, r) | sx.With(l, r) | sx.Plus(l, r):
                return self._occurs(var_id, l) or self._occurs(var_id, r)
            case sx.OfCourse(b) | sx.WhyNot(b):
                return self._occurs(var_id, b)
        raise TypeError(f"not a LinearType: {t!r}")

    def _bind(self, var: _TVar, t: sx.LinearType):
        value = _dual(t) if var.negated else t
        if isinstance(value, _TVar) and value.id == var.id:
            if value.negated:
                raise _UnifyError("a type cannot be its own dual")
            return
        if self._occurs(var.id, value):
            raise _UnifyError("cyclic type")
        self.subst[var.id] = value

    def unify(self, a: sx.LinearType, b: sx.LinearType):
        a, b = self.resolve(a), self.resolve(b)
        if a == b:
            return
        if isinstance(a, _TVar):
            self._bind(a, b)
            return
        if isinstance(b, _TVar):
            self._bind(b, a)
            return
        if type(a) is not type(b):
            raise _UnifyError(f"{render(a)} vs {render(b)}")
        match a, b:
            case (sx.Atom(), sx.Atom()):
                raise _UnifyError(f"{render(a)} vs {render(b)}")
            case (sx.OfCourse(x), sx.OfCourse(y)) | (sx.WhyNot(x), sx.WhyNot(y)):
                self.unify(x, y)
            case _:
                self.unify(a.left, b.left)  # type: ignore[union-attr]
                self.unify(a.right, b.right)  # type: ignore[union-attr]

    def default_leftovers(self):
        """Bind every still-free variable to the default currency atom."""
        fallback = sx.Atom(self.default_unit)
        for var_id in self.created:
            if self.resolve(_TVar(var_id)) == _TVar(var_id):
                self.subst[var_id] = fallback


# ---------------------------------------------------------------------------
# The checking scope

_BINDER = "binder"


class _Scope:
    def __init__(self, program, declared, unifier: _Unifier):
        self.program = program
        self.unifier = unifier
        if len(declared) != len(program.interface):
            raise TypeMismatchError(
                f"{len(declared)} type(s) declared for "
                f"{len(program.interface)} interface entr{'y' if len(program.interface) == 1 else 'ies'}",
                program.span,
            )
        self.declared = [
            unifier.fresh() if t is None else t for t in declared
        ]
        self.commits: dict[sx.Address, list[sx.LinearType]] = {}
        self.census: dict[sx.Address, list[str]] = {}
        self._run_census()

    # -- linearity census ----------------------------------------------------

    def _run_census(self):
        for entry in self.program.interface:
            for address, tag in _sites(entry, sx.ENTRY):
                self.census.setdefault(address, []).append(tag)
        for txn in self.program.pending:
            for side in (txn.left, txn.right):
                for address, tag in _sites(side, sx.PENDING):
                    self.census.setdefault(address, []).append(tag)
        for address, tags in self.census.items():
            if len(tags) == 2:
                continue
            if len(tags) == 1 and tags[0] == sx.ENTRY:
                continue
            raise NonLinearAddressError(address.render(), len(tags), span=self.program.span)

    # -- occurrence table ---------------------------------------------------

    def _learn(self, address, t, span):
        known = self.commits.setdefault(address, [])
        if len(known) >= len(self.census[address]):
            raise TypeMismatchError(
                f"address {address.render()} has more typed occurrences than uses", span
            )
        if known:
            try:
                self.unifier.unify(t, _dual(known[0]))
            except _UnifyError as err:
                raise TypeMismatchError(
                    f"occurrences of {address.render()} must have dual types: {err}", span
                ) from None
        known.append(t)

    # -- driver ---------------------------------------------------------------

    def run(self) -> tuple[list[sx.LinearType], Derivation]:
        entry_derivs = []
        for entry, declared in zip(self.program.interface, self.declared):
            _, deriv = self._type_expr(entry, declared)
            entry_derivs.append(deriv)
        txn_derivs = [self._type_txn(txn) for txn in self.program.pending]
        types = [self.unifier.resolve(t) for t in self.declared]
        derivation = Derivation(
            "Program", render(self.program), None, tuple(entry_derivs + txn_derivs)
        )
        return types, derivation

    def _type_txn(self, txn) -> Derivation:
        lt, ld = self._type_expr(txn.left, None)
        try:
            _, rd = self._type_expr(txn.right, _dual(lt))
        except _UnifyError as err:
            raise TypeMismatchError(
                f"transaction joins non-dual types: {err}", txn.span
            ) from None
        return Derivation("Cut", render(txn), lt, (ld, rd))

    # -- expression typing ------------------------------------------------------

    def _want(self, expected, cls, span, what):
        """Force ``expected`` into shape ``cls``, returning the child slots."""
        arity = 1 if cls in (sx.OfCourse, sx.WhyNot) else 2
        if expected is None:
            slots = tuple(self.unifier.fresh() for _ in range(arity))
            return cls(*slots), slots
        resolved = self.unifier.resolve(expected)
        if isinstance(resolved, _TVar):
            slots = tuple(self.unifier.fresh() for _ in range(arity))
            self.unifier.unify(resolved, cls(*slots))
            return cls(*slots), slots
        if not isinstance(resolved, cls):
            raise TypeMismatchError(
                f"{what} cannot have type {render(resolved)}", span
            )
        if arity == 1:
            return resolved, (resolved.body,)
        return resolved, (resolved.left, resolved.right)

    def _match_expected(self, expected, actual, span):
        if expected is None:
            return
        try:
            self.unifier.unify(expected, actual)
        except _UnifyError as err:
            raise TypeMismatchError(f"expected type does not fit: {err}", span) from None

    def _type_expr(self, e, expected) -> tuple[sx.LinearType, Derivation]:
        match e:
            case sx.Addr(address):
                t = expected if expected is not None else self.unifier.fresh()
                self._learn(address, t, e.span)
                return t, Derivation("Axiom", address.render(), t)
            case sx.Unit(unit):
                t = sx.Atom(unit)
                self._match_expected(expected, t, e.span)
                return t, Derivation("Literal", unit, t)
            case sx.Dual(sx.Unit(unit)):
                t = sx.Atom(unit, True)
                self._match_expected(expected, t, e.span)
                return t, Derivation("Literal", unit + "^", t)
            case sx.Dual():
                raise TypeMismatchError("dual marker survives only on literals", e.span)
            case sx.Iso(left, right):
                out, (lw, rw) = self._want(expected, sx.Tensor, e.span, "an isolation")
                _, ld = self._type_expr(left, lw)
                _, rd = self._type_expr(right, rw)
                return out, Derivation("Tensor", render(e), out, (ld, rd))
            case sx.Conn(left, right):
                out, (lw, rw) = self._want(expected, sx.Par, e.span, "a connection")
                _, ld = self._type_expr(left, lw)
                _, rd = self._type_expr(right, rw)
                return out, Derivation("Par", render(e), out, (ld, rd))
            case sx.Store(inner):
                out, (bw,) = self._want(expected, sx.WhyNot, e.span, "storage")
                _, deriv = self._type_expr(inner, bw)
                return out, Derivation("Storage", render(e), out, (deriv,))
            case sx.Dispose():
                out, _ = self._want(expected, sx.WhyNot, e.span, "disposal")
                return out, Derivation("Disposal", "_", out)
            case sx.Contract(left, right):
                out, _ = self._want(expected, sx.WhyNot, e.span, "contraction")
                _, ld = self._type_expr(left, out)
                _, rd = self._type_expr(right, out)
                return out, Derivation("Contraction", render(e), out, (ld, rd))
            case sx.Inl(inner):
                out, (lw, _) = self._want(expected, sx.Plus, e.span, "a selection")
                _, deriv = self._type_expr(inner, lw)
                return out, Derivation("Left", render(e), out, (deriv,))
            case sx.Inr(inner):
                out, (_, rw) = self._want(expected, sx.Plus, e.span, "a selection")
                _, deriv = self._type_expr(inner, rw)
                return out, Derivation("Right", render(e), out, (deriv,))
            case sx.Choose():
                return self._type_choose(e, expected)
            case sx.Bang():
                return self._type_bang(e, expected)
        raise TypeMismatchError(f"cannot type {type(e).__name__}", getattr(e, "span", None))

    # -- boxes -------------------------------------------------------------------

    def _binder_split(self, box):
        """Context binders for a box, validating the bound-list arity."""
        if isinstance(box, sx.Choose):
            width = len(box.left.interface)
            if width == 0 or len(box.right.interface) != width:
                raise BranchContextMismatchError(
                    "menu branches must expose the same, non-empty interface", box.span
                )
            if len(box.bound) == width:
                return box.bound[1:]  # inert placeholder at the head
            if len(box.bound) == width - 1:
                return box.bound
            raise TypeMismatchError(
                f"menu binds {len(box.bound)} address(es) for branches of width {width}",
                box.span,
            )
        width = len(box.body.interface)
        if width == 0:
            raise TypeMismatchError("replication body must expose a principal port", box.span)
        if len(box.bound) != width - 1:
            raise TypeMismatchError(
                f"replication binds {len(box.bound)} address(es) for a body of width {width}",
                box.span,
            )
        return box.bound

    def _context_expectations(self, binders):
        # A binder's partner occurrence (the conclusion's context entry)
        # carries the same type as the branch's own context entry; only the
        # binder-list occurrence itself is dual.
        out = []
        for x in binders:
            known = self.commits.get(x)
            out.append(known[0] if known else self.unifier.fresh())
        return out

    def _check_branch(self, branch, declared):
        scope = _Scope(branch, declared, self.unifier)
        return scope.run()

    def _type_choose(self, box, expected):
        binders = self._binder_split(box)
        out, (lw, rw) = self._want(expected, sx.With, box.span, "a menu")
        ctx = self._context_expectations(binders)
        left_types, left_deriv = self._check_branch(box.left, [lw] + ctx)
        # The right branch gets its own slots; requiring the two context
        # vectors to agree is a distinct, reportable failure.
        right_ctx = [self.unifier.fresh() for _ in binders]
        right_types, right_deriv = self._check_branch(box.right, [rw] + right_ctx)
        for left_g, right_g in zip(left_types[1:], right_types[1:]):
            try:
                self.unifier.unify(left_g, right_g)
            except _UnifyError:
                raise BranchContextMismatchError(
                    "menu branches disagree on their shared context: "
                    f"({', '.join(render(self.unifier.resolve(t)) for t in left_types[1:])}) vs "
                    f"({', '.join(render(self.unifier.resolve(t)) for t in right_types[1:])})",
                    box.span,
                ) from None
        for x, g in zip(binders, left_types[1:]):
            self._learn(x, _dual(g), box.span)
        return out, Derivation("With", render(box), out, (left_deriv, right_deriv))

    def _type_bang(self, box, expected):
        binders = self._binder_split(box)
        out, (bw,) = self._want(expected, sx.OfCourse, box.span, "replication")
        ctx = self._context_expectations(binders)
        types, deriv = self._check_branch(box.body, [bw] + ctx)
        for g in types[1:]:
            resolved = self.unifier.resolve(g)
            if isinstance(resolved, _TVar):
                self.unifier.unify(resolved, sx.WhyNot(self.unifier.fresh()))
            elif not isinstance(resolved, sx.WhyNot):
                raise PromotionContextError(
                    f"replication context must be ?-typed, found {render(resolved)}",
                    box.span,
                )
        for x, g in zip(binders, types[1:]):
            self._learn(x, _dual(g), box.span)
        return out, Derivation("Replication", render(box), out, (deriv,))


def _sites(e, tag):
    """Surface occurrences with binder occurrences tagged separately."""
    match e:
        case sx.Addr(address):
            yield (address, tag)
        case sx.Unit() | sx.Dispose():
            return
        case sx.Dual(inner) | sx.Inl(inner) | sx.Inr(inner) | sx.Store(inner):
            yield from _sites(inner, tag)
        case sx.Iso(left, right) | sx.Conn(left, right) | sx.Contract(left, right):
            yield from _sites(left, tag)
            yield from _sites(right, tag)
        case sx.Choose() | sx.Bang():
            for binder in sx.context_binders(e):
                yield (binder, _BINDER)
        case _:
            raise TypeError(f"cannot analyse {e!r}")


# ---------------------------------------------------------------------------
# Public API

def _resolve_derivation(deriv: Derivation, unifier: _Unifier) -> Derivation:
    t = None if deriv.type is None else unifier.resolve(deriv.type)
    return Derivation(
        deriv.rule,
        deriv.subject,
        t,
        tuple(_resolve_derivation(c, unifier) for c in deriv.children),
    )


def check(
    program: sx.Program,
    declared,
    *,
    default_unit: str = DEFAULT_UNIT,
) -> TypedJudgment:
    """Check ``program`` against the declared interface types.

    Raises a :class:`TypeCheckError` subclass when no derivation exists.
    """
    unifier = _Unifier(default_unit)
    scope = _Scope(program, list(declared), unifier)
    try:
        types, derivation = scope.run()
    except _UnifyError as err:
        raise TypeMismatchError(str(err), program.span) from None
    unifier.default_leftovers()
    types = [unifier.resolve(t) for t in types]
    if any(_has_var(t) for t in types):
        raise TypeMismatchError("could not resolve all interface types", program.span)
    return TypedJudgment(
        program, tuple(types), _resolve_derivation(derivation, unifier)
    )


def _has_var(t: sx.LinearType) -> bool:
    if isinstance(t, _TVar):
        return True
    match t:
        case sx.Atom():
            return False
        case sx.Tensor(l, r) | sx.Par(l, r) | sx.With(l, r) | sx.Plus(l, r):
            return _has_var(l) or _has_var(r)
        case sx.OfCourse(b) | sx.WhyNot(b):
            return _has_var(b)
    raise TypeError(f"not a LinearType: {t!r}")


# -- expression-level checking against an explicit context --------------------


@dataclass
class _Binding:
    expr: sx.Expression
    type: sx.LinearType
    consumed: bool = False


class TypeContext:
    """An ordered, linearly consumed list of expression/type bindings."""

    def __init__(self, bindings=()):
        self._bindings = [_Binding(e, t) for e, t in bindings]

    def __len__(self):
        return len(self._bindings)

    def __iter__(self):
        return iter((b.expr, b.type) for b in self._bindings)

    def copy(self) -> "TypeContext":
        out = TypeContext()
        out._bindings = [_Binding(b.expr, b.type, b.consumed) for b in self._bindings]
        return out

    def consume(self, expr) -> sx.LinearType | None:
        for binding in self._bindings:
            if not binding.consumed and binding.expr == expr:
                binding.consumed = True
                return binding.type
        return None

    def residual(self) -> "TypeContext":
        return TypeContext(
            (b.expr, b.type) for b in self._bindings if not b.consumed
        )

    def fully_consumed(self) -> bool:
        return all(b.consumed for b in self._bindings)


def check_expression(
    e: sx.Expression,
    context: TypeContext,
    expected: sx.LinearType | None = None,
    *,
    default_unit: str = DEFAULT_UNIT,
) -> tuple[sx.LinearType, TypeContext]:
    """Type one expression against a context of sub-expression bindings.

    The context plays the role of the surrounding resources: a binding is
    consumed exactly where its expression occurs, and the residual context
    is returned alongside the type. Addresses not bound in the context are
    rejected; a selection needs an expected ``A + B`` to supply the absent
    summand.
    """
    ctx = context.copy()

    def go(node, want):
        bound = ctx.consume(node)
        if bound is not None:
            if want is not None and want != bound:
                raise TypeMismatchError(
                    f"expected {render(want)}, found {render(bound)}",
                    getattr(node, "span", None),
                )
            return bound
        match node:
            case sx.Unit(unit):
                t = sx.Atom(unit)
            case sx.Dual(sx.Unit(unit)):
                t = sx.Atom(unit, True)
            case sx.Iso(left, right):
                if isinstance(want, sx.Tensor):
                    t = sx.Tensor(go(left, want.left), go(right, want.right))
                else:
                    t = sx.Tensor(go(left, None), go(right, None))
            case sx.Conn(left, right):
                if isinstance(want, sx.Par):
                    t = sx.Par(go(left, want.left), go(right, want.right))
                else:
                    t = sx.Par(go(left, None), go(right, None))
            case sx.Store(inner):
                t = sx.WhyNot(go(inner, want.body if isinstance(want, sx.WhyNot) else None))
            case sx.Contract(left, right):
                lt = go(left, want)
                rt = go(right, lt)
                if lt != rt or not isinstance(lt, sx.WhyNot):
                    raise TypeMismatchError(
                        "contraction joins two uses of one ?-typed resource",
                        getattr(node, "span", None),
                    )
                t = lt
            case sx.Inl(inner):
                if not isinstance(want, sx.Plus):
                    raise TypeMismatchError(
                        "selection needs an expected A + B type", getattr(node, "span", None)
                    )
                go(inner, want.left)
                t = want
            case sx.Inr(inner):
                if not isinstance(want, sx.Plus):
                    raise TypeMismatchError(
                        "selection needs an expected A + B type", getattr(node, "span", None)
                    )
                go(inner, want.right)
                t = want
            case sx.Dispose():
                if not isinstance(want, sx.WhyNot):
                    raise TypeMismatchError(
                        "disposal needs an expected ?A type", getattr(node, "span", None)
                    )
                t = want
            case sx.Addr(address):
                raise TypeMismatchError(
                    f"address {address.render()} is not bound in the context",
                    getattr(node, "span", None),
                )
            case sx.Choose() | sx.Bang():
                t = _box_type(node, default_unit)
            case _:
                raise TypeMismatchError(
                    f"cannot type {type(node).__name__}", getattr(node, "span", None)
                )
        if want is not None and t != want:
            raise TypeMismatchError(
                f"expected {render(want)}, found {render(t)}", getattr(node, "span", None)
            )
        return t

    result = go(e, expected)
    return result, ctx


def _box_type(node, default_unit) -> sx.LinearType:
    """Synthesise a box's type by checking its branch programs standalone."""
    unifier = _Unifier(default_unit)
    if isinstance(node, sx.Choose):
        left = _Scope(node.left, [None] * len(node.left.interface), unifier)
        ltypes, _ = left.run()
        right = _Scope(node.right, [None] * len(node.right.interface), unifier)
        rtypes, _ = right.run()
        unifier.default_leftovers()
        return sx.With(unifier.resolve(ltypes[0]), unifier.resolve(rtypes[0]))
    body = _Scope(node.body, [None] * len(node.body.interface), unifier)
    types, _ = body.run()
    unifier.default_leftovers()
    return sx.OfCourse(unifier.resolve(types[0]))


# ---------------------------------------------------------------------------
# Derivation replay

def replay(judgment: TypedJudgment) -> bool:
    """Re-derive the judgment from its stored derivation tree.

    Verifies that every node's conclusion follows from its premises by the
    named rule, and that the root assigns the judgment's interface types.
    """
    root = judgment.derivation
    if root.rule != "Program":
        return False
    n = len(judgment.program.interface)
    if len(root.children) != n + len(judgment.program.pending):
        return False
    entry_types = tuple(child.type for child in root.children[:n])
    if entry_types != judgment.interface_types:
        return False
    return all(_replay_node(child) for child in root.children)


def _replay_node(node: Derivation) -> bool:
    rule, t, kids = node.rule, node.type, node.children
    if rule == "Axiom" or rule == "Literal":
        return t is not None and not kids
    if rule == "Tensor":
        return (
            len(kids) == 2
            and isinstance(t, sx.Tensor)
            and t == sx.Tensor(kids[0].type, kids[1].type)
            and all(map(_replay_node, kids))
        )
    if rule == "Par":
        return (
            len(kids) == 2
            and isinstance(t, sx.Par)
            and t == sx.Par(kids[0].type, kids[1].type)
            and all(map(_replay_node, kids))
        )
    if rule == "Storage":
        return (
            len(kids) == 1
            and isinstance(t, sx.WhyNot)
            and t.body == kids[0].type
            and _replay_node(kids[0])
        )
    if rule == "Disposal":
        return isinstance(t, sx.WhyNot) and not kids
    if rule == "Contraction":
        return (
            len(kids) == 2
            and isinstance(t, sx.WhyNot)
            and kids[0].type == t
            and kids[1].type == t
            and all(map(_replay_node, kids))
        )
    if rule == "Left":
        return (
            len(kids) == 1
            and isinstance(t, sx.Plus)
            and t.left == kids[0].type
            and _replay_node(kids[0])
        )
    if rule == "Right":
        return (
            len(kids) == 1
            and isinstance(t, sx.Plus)
            and t.right == kids[0].type
            and _replay_node(kids[0])
        )
    if rule == "With":
        if len(kids) != 2 or not isinstance(t, sx.With):
            return False
        left, right = kids
        if left.rule != "Program" or right.rule != "Program":
            return False
        return (
            t == sx.With(_principal_type(left), _principal_type(right))
            and all(map(_replay_node, left.children))
            and all(map(_replay_node, right.children))
        )
    if rule == "Replication":
        if len(kids) != 1 or not isinstance(t, sx.OfCourse):
            return False
        body = kids[0]
        if body.rule != "Program":
            return False
        return t == sx.OfCourse(_principal_type(body)) and all(
            map(_replay_node, body.children)
        )
    if rule == "Cut":
        if len(kids) != 2:
            return False
        lt, rt = kids[0].type, kids[1].type
        return (
            lt is not None
            and rt is not None
            and rt == sx.dual(lt)
            and t == lt
            and all(map(_replay_node, kids))
        )
    if rule == "Program":
        return all(map(_replay_node, node.children))
    return False


def _principal_type(program_node: Derivation) -> sx.LinearType | None:
    if not program_node.children:
        return None
    return program_node.children[0].type
