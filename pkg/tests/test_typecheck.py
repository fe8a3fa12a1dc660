"""Typing rules, linearity, cut duality, and derivation replay."""
from collections import Counter

import pytest

from llbc import parser
from llbc import syntax as sx
from llbc import typecheck as tc
from llbc.errors import (
    BranchContextMismatchError,
    NonLinearAddressError,
    PromotionContextError,
    TypeCheckError,
    TypeMismatchError,
)
from llbc.generate import ProgramGenerator

from helpers import SPEND_TYPES, spend_program


def check_src(program_src, *type_srcs):
    return tc.check(
        parser.parse_program(program_src),
        [parser.parse_type(t) for t in type_srcs],
    )


class TestAxiom:
    def test_address_pair(self):
        judgment = check_src("(x, x){}", "(satoshi * btc)^", "satoshi * btc")
        assert [c.rule for c in judgment.derivation.children] == ["Axiom", "Axiom"]
        assert parser.render(judgment.interface_types[0]) == "satoshi^ # btc^"

    def test_mismatched_pair_rejected(self):
        with pytest.raises(TypeMismatchError):
            check_src("(x, x){}", "satoshi", "satoshi")

    def test_single_port(self):
        judgment = check_src("(x){}", "?satoshi")
        assert judgment.interface_types == (sx.WhyNot(sx.Atom("satoshi")),)


class TestGenesis:
    # Oracle: the two-coin genesis has exactly the derivation
    #   Program[ Tensor[Axiom, Axiom], Cut[Axiom, Literal], Cut[Axiom, Literal] ]
    # built by hand from the rules before the checker existed.
    def test_genesis_m2_derivation(self):
        judgment = check_src(
            "(addr1 * addr2){ txn(addr1, satoshi); txn(addr2, satoshi) }",
            "satoshi * satoshi",
        )
        root = judgment.derivation
        assert [c.rule for c in root.children] == ["Tensor", "Cut", "Cut"]
        tensor = root.children[0]
        assert [c.rule for c in tensor.children] == ["Axiom", "Axiom"]
        for cut in root.children[1:]:
            assert [c.rule for c in cut.children] == ["Axiom", "Literal"]
            # the assignment cuts a demand for one satoshi against the coin
            assert parser.render(cut.type) == "satoshi^"
        assert tc.replay(judgment)

    def test_genesis_wrong_type_rejected(self):
        with pytest.raises(TypeMismatchError):
            check_src(
                "(addr1 * addr2){ txn(addr1, satoshi); txn(addr2, satoshi) }",
                "satoshi * btc",
            )


class TestLinearity:
    def test_triple_use_rejected(self):
        with pytest.raises(NonLinearAddressError) as err:
            check_src("(x){ txn(x, satoshi); txn(x, satoshi) }", "satoshi")
        assert err.value.count == 3

    def test_dangling_pending_address_rejected(self):
        with pytest.raises(NonLinearAddressError):
            check_src("(){ txn(x, satoshi) }")

    def test_unbalanced_binder_rejected(self):
        # A context binder with no partner occurrence is an unconnected wire.
        with pytest.raises(NonLinearAddressError):
            check_src(
                "(){ txn(choose(m){ (satoshi, btc){}; (satoshi, btc){} },"
                " inl(satoshi^)) }"
            )

    def test_cut_consumes_both_occurrences(self):
        judgment = check_src("(){ txn(x, satoshi); txn(x, satoshi^) }")
        assert judgment.interface_types == ()

    def test_accepted_programs_count_two_uses_per_address(self):
        # The invariant, asserted by counting rather than trusted: every
        # free address of an accepted program occurs exactly twice, or
        # once inside an interface entry.
        generator = ProgramGenerator(seed=888)
        for _ in range(60):
            generated = generator.typed_program()
            tc.check(generated.program, generated.declared)
            counts = Counter()
            entry_tagged = set()
            for address, tag in sx.surface_occurrences(generated.program):
                counts[address] += 1
                if tag == sx.ENTRY:
                    entry_tagged.add(address)
            for address, count in counts.items():
                assert count == 2 or (count == 1 and address in entry_tagged)


class TestCutDuality:
    def test_accepted_cuts_are_dual(self):
        generator = ProgramGenerator(seed=99)
        for _ in range(60):
            generated = generator.typed_program()
            judgment = tc.check(generated.program, generated.declared)
            n = len(generated.program.interface)
            for cut in judgment.derivation.children[n:]:
                assert cut.rule == "Cut"
                left, right = cut.children
                assert right.type == sx.dual(left.type)

    def test_non_dual_cut_rejected(self):
        with pytest.raises(TypeMismatchError):
            check_src("(){ txn(satoshi, btc) }")

    def test_unit_literal_axiom(self):
        judgment = check_src("(){ txn(x, satoshi); txn(x, satoshi^) }")
        cut = judgment.derivation.children[0]
        kinds = {c.rule for c in cut.children}
        assert "Literal" in kinds


class TestAdditives:
    def test_menu_against_selection(self):
        judgment = check_src(
            "(){ txn(choose(){ (satoshi){}; (btc){} }, inl(satoshi^)) }"
        )
        cut = judgment.derivation.children[0]
        assert parser.render(cut.type) == "satoshi & btc"

    def test_branch_context_mismatch(self):
        with pytest.raises(BranchContextMismatchError):
            check_src(
                "(m){ txn(choose(m){ (satoshi, btc){}; (satoshi, doge){} },"
                " inl(satoshi^)) }",
                "btc",
            )

    def test_menu_with_context(self):
        judgment = check_src(
            "(m){ txn(choose(m){ (satoshi, btc){}; (doge, btc){} }, inr(doge^)) }",
            "btc",
        )
        assert judgment.interface_types == (sx.Atom("btc"),)

    def test_joint_resolution_of_selection_against_menu(self):
        # Neither side determines the cut type alone; together they do:
        # the menu pins the selection's payload, the selection pins the
        # menu's absent summand.
        judgment = check_src(
            "(){ txn(choose(){ (inr(satoshi)){}; (doge){} },"
            " inl(choose(){ (btc^){}; (satoshi^){} })) }"
        )
        cut = judgment.derivation.children[0]
        assert parser.render(cut.type) == "(btc + satoshi) & doge"


class TestExponentials:
    def test_replication_against_storage(self):
        judgment = check_src("(){ txn(!(){ (satoshi){} }, ?satoshi^) }")
        assert parser.render(judgment.derivation.children[0].type) == "!satoshi"

    def test_replication_against_disposal(self):
        check_src("(){ txn(!(){ (satoshi){} }, _) }")

    def test_replication_against_contraction(self):
        check_src("(){ txn(!(){ (satoshi){} }, ?satoshi^ @ ?satoshi^) }")

    def test_promotion_context_must_be_whynot(self):
        with pytest.raises(PromotionContextError):
            check_src(
                "(s){ txn(!(s){ (satoshi, btc){} }, ?satoshi^) }",
                "btc",
            )

    def test_promotion_context_accepted(self):
        judgment = check_src(
            "(s){ txn(!(s){ (satoshi, ?btc){} }, ?satoshi^) }",
            "?btc",
        )
        assert judgment.interface_types == (sx.WhyNot(sx.Atom("btc")),)


class TestWorkedExample:
    def test_spend_checks(self):
        judgment = tc.check(spend_program(), [parser.parse_type(SPEND_TYPES)])
        assert parser.render(judgment.interface_types[0]) == "satoshi * satoshi * satoshi"
        cut = judgment.derivation.children[1]
        # genesis branch typed as three coins, burn branch as three sinks
        assert parser.render(cut.type) == (
            "satoshi * satoshi * satoshi & ?satoshi * ?satoshi * ?satoshi"
        )

    def test_spend_replay(self):
        judgment = tc.check(spend_program(), [parser.parse_type(SPEND_TYPES)])
        assert tc.replay(judgment)


class TestDerivationReplay:
    def test_replay_generated(self):
        generator = ProgramGenerator(seed=123)
        for _ in range(80):
            generated = generator.typed_program()
            judgment = tc.check(generated.program, generated.declared)
            assert tc.replay(judgment)

    def test_replay_detects_tampering(self):
        judgment = check_src("(x){ txn(x, satoshi) }", "satoshi")
        bad = tc.TypedJudgment(
            judgment.program,
            (sx.Atom("btc"),),
            judgment.derivation,
        )
        assert not tc.replay(bad)


class TestDeclaredTypes:
    def test_arity_mismatch(self):
        with pytest.raises(TypeMismatchError):
            check_src("(x, y){}", "satoshi")

    def test_declared_types_are_mandatory_for_ports(self):
        # Without annotations the two open ports default deterministically
        # rather than being inferred.
        p = parser.parse_program("(x){}")
        judgment = tc.check(p, [parser.parse_type("btc")])
        assert judgment.interface_types == (sx.Atom("btc"),)


class TestCheckExpression:
    def test_isolation_splits_context(self):
        a, b = parser.parse_expression("a"), parser.parse_expression("b")
        ctx = tc.TypeContext([(a, parser.parse_type("satoshi")), (b, parser.parse_type("btc"))])
        t, residual = tc.check_expression(sx.Iso(a, b), ctx)
        assert parser.render(t) == "satoshi * btc"
        assert len(residual.residual()) == 0

    def test_selection_needs_declared_summand(self):
        a = parser.parse_expression("a")
        ctx = tc.TypeContext([(a, parser.parse_type("satoshi"))])
        t, _ = tc.check_expression(
            sx.Inl(a), ctx, parser.parse_type("satoshi + btc")
        )
        assert parser.render(t) == "satoshi + btc"
        with pytest.raises(TypeCheckError):
            tc.check_expression(sx.Inl(a), ctx)

    def test_contraction(self):
        t_expr = parser.parse_expression("t")
        u_expr = parser.parse_expression("u")
        ctx = tc.TypeContext(
            [(t_expr, parser.parse_type("?satoshi")), (u_expr, parser.parse_type("?satoshi"))]
        )
        t, residual = tc.check_expression(parser.parse_expression("t @ u"), ctx)
        assert parser.render(t) == "?satoshi"
        assert residual.fully_consumed()

    def test_residual_context(self):
        a, b = parser.parse_expression("a"), parser.parse_expression("b")
        ctx = tc.TypeContext([(a, parser.parse_type("satoshi")), (b, parser.parse_type("btc"))])
        t, residual = tc.check_expression(a, ctx)
        assert parser.render(t) == "satoshi"
        assert [parser.render(ty) for _, ty in residual.residual()] == ["btc"]

    def test_unbound_address_rejected(self):
        with pytest.raises(TypeCheckError):
            tc.check_expression(parser.parse_expression("a"), tc.TypeContext())
