"""Core model: duality, desugaring, renaming, and address analysis."""
import pytest
from hypothesis import given, strategies as st

from llbc import parser
from llbc import syntax as sx
from llbc.errors import DualityError

sat = sx.Atom("satoshi")
btc = sx.Atom("btc")


def types(max_depth=8):
    atoms = st.builds(
        sx.Atom,
        st.sampled_from(["satoshi", "btc", "ampere", "doge"]),
        st.booleans(),
    )
    return st.recursive(
        atoms,
        lambda sub: st.one_of(
            st.builds(sx.Tensor, sub, sub),
            st.builds(sx.Par, sub, sub),
            st.builds(sx.With, sub, sub),
            st.builds(sx.Plus, sub, sub),
            st.builds(sx.OfCourse, sub),
            st.builds(sx.WhyNot, sub),
        ),
        max_leaves=2 ** max_depth,
    )


class TestDual:
    def test_atom_flips_polarity(self):
        assert sx.dual(sx.Tensor(sat, sat)) == sx.Par(
            sx.Atom("satoshi", True), sx.Atom("satoshi", True)
        )

    def test_exponential(self):
        assert sx.dual(sx.OfCourse(sat)) == sx.WhyNot(sx.Atom("satoshi", True))

    def test_connective_swaps(self):
        assert isinstance(sx.dual(sx.With(sat, btc)), sx.Plus)
        assert isinstance(sx.dual(sx.Plus(sat, btc)), sx.With)
        assert isinstance(sx.dual(sx.Par(sat, btc)), sx.Tensor)

    @given(types())
    def test_involution(self, t):
        assert sx.dual(sx.dual(t)) == t


class TestDualizeExpr:
    def test_identity_on_addresses(self):
        x = sx.Addr(sx.Address("x"))
        assert sx.dualize_expr(x) == x

    def test_swaps_isolation_and_connection(self):
        e = parser.parse_expression("a * b")
        assert parser.render(sx.dualize_expr(e)) == "a # b"

    def test_unit_becomes_demand(self):
        assert sx.dualize_expr(sx.Unit("btc")) == sx.Dual(sx.Unit("btc"))

    def test_involution_on_dualizable(self):
        for source in ("a # b", "a * (b # c)", "satoshi", "x"):
            e = parser.parse_expression(source)
            assert sx.dualize_expr(sx.dualize_expr(e)) == e

    @pytest.mark.parametrize("source", ["inl(a)", "?a", "_", "a @ b"])
    def test_rejected_forms(self, source):
        with pytest.raises(DualityError):
            sx.dualize_expr(parser.parse_expression(source))

    def test_rejected_on_boxes(self):
        box = parser.parse_expression("choose(x){ (a){}; (b){} }")
        with pytest.raises(DualityError):
            sx.dualize_expr(box)


class TestDesugar:
    def test_simple_obligation(self):
        e = sx.desugar_obligation(
            sx.Addr(sx.Address("x")), sx.Addr(sx.Address("y"))
        )
        assert parser.render(e) == "x # y"

    def test_isolated_operand(self):
        e = parser.parse_expression("(a * b) -o c")
        assert parser.render(e) == "a # b # c"
        assert e == sx.Conn(
            sx.Conn(sx.Addr(sx.Address("a")), sx.Addr(sx.Address("b"))),
            sx.Addr(sx.Address("c")),
        )

    def test_nested_obligations(self):
        e = parser.parse_expression("x -o (y -o z)")
        assert parser.render(e) == "x # (y # z)"

    def test_introduces_no_new_addresses(self):
        left = parser.parse_expression("a * (b # c)")
        right = parser.parse_expression("d")
        out = sx.desugar_obligation(left, right)
        assert sx.free_addresses(out) == sx.free_addresses(left) | sx.free_addresses(right)


class TestRename:
    def test_single_step(self):
        x = sx.Address("x")
        assert sx.rename(x, "l") == sx.Address("x", ("l",))
        assert sx.rename(x, "l") != x
        assert sx.rename(x, "l") != sx.rename(x, "r")

    def test_structural(self):
        t = parser.parse_program("(){ txn(a, b * c) }").pending[0]
        renamed = sx.rename(t, "r")
        assert parser.render(renamed) == "txn(a.r, b.r * c.r)"

    def test_two_step_paths_pairwise_distinct(self):
        # Oracle: enumerate every address reachable in at most two renames
        # and require them pairwise distinct.
        x = sx.Address("x")
        reached = [x]
        for first in ("l", "r"):
            one = sx.rename(x, first)
            reached.append(one)
            for second in ("l", "r"):
                reached.append(sx.rename(one, second))
        assert len(set(reached)) == len(reached)

    def test_preserves_shape(self):
        p = parser.parse_program(
            "(a * b){ txn(choose(x){ (c){}; (d){} }, inl(a)); txn(b, satoshi) }"
        )
        renamed = sx.rename(p, "l")
        assert sx.node_count(renamed) == sx.node_count(p)
        assert len(renamed.interface) == len(p.interface)
        assert all(
            type(x) is type(y) for x, y in zip(renamed.pending, p.pending)
        )

    def test_injective_on_addresses(self):
        p = parser.parse_program("(a, b){ txn(a, c); txn(c, b) }")
        before = sx.free_addresses(p)
        after = sx.free_addresses(sx.rename(p, "r"))
        assert len(after) == len(before)
        assert after == {sx.rename(a, "r") for a in before}


class TestFreeAddresses:
    def test_bare_interface(self):
        p = parser.parse_program("(x){}")
        assert sx.free_addresses(p) == {sx.Address("x")}

    def test_binders_are_visible_but_scope_branches(self):
        p = parser.parse_program(
            "(){ txn(choose(x){ (a, q){}; (b, q2){} }, inl(y)) }"
        )
        free = sx.free_addresses(p)
        # The context binder x and the payload y are free; branch-internal
        # names are not.
        assert sx.Address("x") in free
        assert sx.Address("y") in free
        assert sx.Address("a") in free and sx.Address("q") in free
        # Branch names shadowed by the binder do not leak.
        shadowing = parser.parse_program(
            "(){ txn(choose(x){ (a, x){}; (b, x){} }, inl(y)) }"
        )
        assert sx.Address("a") in sx.free_addresses(shadowing)

    def test_placeholder_binder_is_inert(self):
        p = parser.parse_program("(){ txn(choose(spnd){ (a){}; (b){} }, inl(y)) }")
        free = sx.free_addresses(p)
        assert sx.Address("spnd") not in free
        assert free == {sx.Address("a"), sx.Address("b"), sx.Address("y")}

    def test_genesis_m3(self):
        genesis = parser.parse_program(
            "(addr1 * addr2 * addr3)"
            "{ txn(addr1, satoshi); txn(addr2, satoshi); txn(addr3, satoshi) }"
        )
        assert sx.free_addresses(genesis) == {
            sx.Address("addr1"),
            sx.Address("addr2"),
            sx.Address("addr3"),
        }


class TestAlphaEquivalence:
    def test_fresh_paths_relabel(self):
        a = parser.parse_program("(x){ txn(x.l, satoshi) }")
        b = parser.parse_program("(x){ txn(x.r, satoshi) }")
        assert sx.alpha_equivalent(a, b)

    def test_base_names_must_match(self):
        a = parser.parse_program("(x){ txn(y, satoshi) }")
        b = parser.parse_program("(x){ txn(z, satoshi) }")
        assert not sx.alpha_equivalent(a, b)

    def test_relabelling_must_be_bijective(self):
        a = parser.parse_program("(){ txn(x.l, x.r) }")
        b = parser.parse_program("(){ txn(x.l, x.l) }")
        assert not sx.alpha_equivalent(a, b)

    def test_pending_order_insensitive(self):
        a = parser.parse_program("(x, y){ txn(x, satoshi); txn(y, btc) }")
        b = parser.parse_program("(x, y){ txn(y, btc); txn(x, satoshi) }")
        assert sx.alpha_equivalent(a, b)

    def test_transaction_sides_symmetric(self):
        a = parser.parse_program("(x){ txn(x, satoshi) }")
        b = parser.parse_program("(x){ txn(satoshi, x) }")
        assert sx.alpha_equivalent(a, b)

    def test_interface_order_sensitive(self):
        a = parser.parse_program("(x, y){}")
        b = parser.parse_program("(y, x){}")
        assert not sx.alpha_equivalent(a, b)


class TestCounting:
    def test_unit_multiset_counts_through_boxes(self):
        p = parser.parse_program(
            "(){ txn(choose(x){ (satoshi){}; (2 . satoshi){} }, inl(btc)) }"
        )
        counts = sx.unit_multiset(p)
        assert counts == {"satoshi": 3, "btc": 1}

    def test_node_count_positive(self):
        p = parser.parse_program("(x){ txn(x, satoshi) }")
        assert sx.node_count(p) == 5  # program, txn, interface addr, txn addr, unit
