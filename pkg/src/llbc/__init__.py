"""A terminating transaction scripting language with a linear type system.

Scripts describe block-chain states: resources at addresses plus pending
transactions. Well-typed scripts normalize to a ledger-like assignment of
currency to addresses. A companion module composes whole chains of blocks
when (or by making sure that) their address spaces are isolated.
"""
from .chains import (
    Block,
    Chain,
    RewireResult,
    Transfer,
    addresses,
    blockwise_isolated,
    chain_from_json,
    chain_to_json,
    chain_to_program,
    compose_rewire,
    compose_verify,
    isolated,
)
from .errors import (
    BranchContextMismatchError,
    DualityError,
    FuelExhausted,
    HeightMismatch,
    IsolationError,
    LlbcError,
    NonLinearAddressError,
    NotInLedgerForm,
    ParseError,
    PromotionContextError,
    TypeCheckError,
    TypeMismatchError,
)
from .parser import parse_expression, parse_program, parse_script, parse_type, render
from .reduce import (
    Ledger,
    NormalizeResult,
    Redex,
    find_redexes,
    normalize,
    readback_ledger,
    step,
)
from .syntax import (
    Addr,
    Address,
    Atom,
    Bang,
    Choose,
    Conn,
    Contract,
    Dispose,
    Dual,
    Expression,
    Inl,
    Inr,
    Iso,
    LinearType,
    OfCourse,
    Par,
    Plus,
    Program,
    SourceSpan,
    Store,
    Tensor,
    Transaction,
    Unit,
    With,
    WhyNot,
    alpha_equivalent,
    desugar_obligation,
    dual,
    dualize_expr,
    free_addresses,
    node_count,
    rename,
    unit_multiset,
)
from .typecheck import TypeContext, TypedJudgment, check, check_expression, replay
from .units import DEFAULT_UNITS, active_units, load_units

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
