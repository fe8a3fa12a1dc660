"""A tour of the type system on small scripts.

Run:  python demos/typing_tour.py
"""
from llbc import check, parse_program, parse_type, render, replay
from llbc.errors import NonLinearAddressError, TypeMismatchError

def show(title, source, *types):
    print(f"== {title}")
    print("  ", source)
    program = parse_program(source)
    try:
        judgment = check(program, [parse_type(t) for t in types])
    except (NonLinearAddressError, TypeMismatchError) as err:
        print("   rejected:", err.message)
        print()
        return
    rendered = ", ".join(render(t) for t in judgment.interface_types)
    print("   well-typed at:", rendered)
    print("   derivation replays:", replay(judgment))
    print()


# The axiom: one address, two dual occurrences.
show("axiom", "(x, x){}", "satoshi^", "satoshi")

# Genesis: assignments typed by cutting a coin demand against a literal.
show(
    "two-coin genesis",
    "(addr1 * addr2){ txn(addr1, satoshi); txn(addr2, satoshi) }",
    "satoshi * satoshi",
)

# Each address must be used exactly twice; a third use is rejected.
show("non-linear use", "(x){ txn(x, satoshi); txn(x, satoshi) }", "satoshi")

# Menus pair a with-type against a selection of dual type.
show(
    "menu and selection",
    "(){ txn(choose(){ (satoshi){}; (btc){} }, inl(satoshi^)) }",
)

# Replication serves copyable resources; storage requests one copy.
show("replication read", "(){ txn(!(){ (satoshi){} }, ?satoshi^) }")

# A cut between non-dual types has no derivation.
show("type clash", "(){ txn(satoshi, btc) }")
