"""Combine whole chains, the safe way and the rewired way.

Blockwise disjointness is not enough: the counterexample pair is disjoint
at every height yet shares addresses across heights, so zipping it would
let early spends interfere with later ones. Full address-space isolation
makes the zip safe; rewiring makes any pair composable.

Run:  python demos/compose_chains.py
"""
import pathlib

from llbc import (
    IsolationError,
    blockwise_isolated,
    chain_to_json,
    chain_to_program,
    compose_rewire,
    compose_verify,
    isolated,
    readback_ledger,
)
from llbc.chains import load_chain

HERE = pathlib.Path(__file__).parent

safe1 = load_chain(str(HERE / "safe1.json"))
safe2 = load_chain(str(HERE / "safe2.json"))
cex1 = load_chain(str(HERE / "cex1.json"))
cex2 = load_chain(str(HERE / "cex2.json"))

print("safe pair:     isolated =", isolated(safe1, safe2))
combined = compose_verify(safe1, safe2)
print(chain_to_json(combined))

print("counterexample: blockwise isolated =", blockwise_isolated(cex1, cex2))
print("counterexample: isolated           =", isolated(cex1, cex2))
try:
    compose_verify(cex1, cex2)
except IsolationError as err:
    print("verify mode refuses:", sorted(a.render() for a in err.shared))

print()
print("rewired composition of the counterexample:")
rewired = compose_rewire(cex1, cex2)
print(chain_to_json(rewired.chain))

print("combined chain as a script, read back as a ledger:")
program = chain_to_program(combined)
import json

print(json.dumps(readback_ledger(program).to_json_dict(), indent=2, sort_keys=True))
