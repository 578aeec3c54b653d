#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "conehedge/oracle.hpp"
#include "conehedge/superhedge.hpp"
#include "proto_trees.hpp"

using namespace conehedge;
using proto::make_proto;
using proto::proto_tree;
using proto::random_claim;

namespace {

ScenarioTree binomial(const Rational& c, const Rational& m0, const Rational& mu,
                      const Rational& md) {
    auto cone = [&](const Rational& m) {
        return c == 1 ? build_cone(BidAskSpec::frictionless({m}), true)
                      : build_cone(BidAskSpec::uniform({m}, c));
    };
    TreeBuilder b;
    b.add_root(cone(m0));
    b.add_child(0, cone(mu));
    b.add_child(0, cone(md));
    b.set_kernels(0, {{1, 0}, {0, 1}});
    return b.finish();
}

Claim bare_claim(const ScenarioTree& tree) {
    Claim cl;
    cl.xi.assign(tree.nodes.size(), Vec{});
    for (const auto& n : tree.nodes)
        if (tree.is_terminal(n.id)) cl.xi[n.id] = Vec(tree.d, Rational(0));
    return cl;
}

Rational price_all_routes(const ScenarioTree& tree, const Claim& claim) {
    auto primal = price_primal(tree, claim);
    REQUIRE_FALSE(primal.arbitrage);
    auto dual = price_dual(tree, claim);
    REQUIRE_FALSE(dual.no_price_system);
    CHECK(dual.price == primal.price);
    auto en = build_enlarged(tree, 3, false);
    auto enl = price_enlarged(en, claim);
    REQUIRE_FALSE(enl.arbitrage);
    CHECK(enl.price == primal.price);
    if (claim.statics.empty()) {
        auto dp = backward_induction(en, claim);
        CHECK(dp.price == primal.price);
        CHECK(g_prime(en, dp.value, tree.root(), Vec(tree.d, Rational(0))) == dp.price);
    }
    return primal.price;
}

}  // namespace

TEST_CASE("the zero claim is free and hedged by doing nothing") {
    auto tree = binomial(Rational(3, 2), 1, 2, Rational(1, 2));
    Claim claim = bare_claim(tree);

    auto primal = price_primal(tree, claim);
    REQUIRE_FALSE(primal.arbitrage);
    CHECK(primal.price == 0);
    CHECK(primal.cert.valid);
    for (const auto& n : tree.nodes)
        for (const auto& x : primal.cert.eta[n.id]) CHECK(x == 0);

    auto dual = price_dual(tree, claim);
    CHECK(dual.price == 0);

    auto en = build_enlarged(tree);
    CHECK(price_enlarged(en, claim).price == 0);

    auto dp = backward_induction(en, claim);
    CHECK(dp.price == 0);
    for (const auto& gs : dp.value.g)
        for (const auto& g : gs) CHECK(g == 0);
    for (const auto& n : tree.nodes)
        for (const auto& x : dp.H[n.id]) CHECK(x == 0);
}

TEST_CASE("frictionless binomial call prices at one third on every route") {
    auto tree = binomial(1, 1, 2, Rational(1, 2));
    Claim claim = bare_claim(tree);
    claim.xi[1] = {0, 1};

    CHECK(price_all_routes(tree, claim) == Rational(1, 3));
}

TEST_CASE("terminal cash prices at face value") {
    auto tree = binomial(Rational(3, 2), 1, 2, Rational(1, 2));
    Claim claim = bare_claim(tree);
    Rational a(-7, 3);
    claim = shift_cash(tree, claim, a);

    CHECK(price_all_routes(tree, claim) == a);
}

TEST_CASE("one-period prices match the hull oracle") {
    {
        auto tree = binomial(Rational(3, 2), 1, 2, Rational(1, 2));
        Claim claim = bare_claim(tree);
        claim.xi[1] = {0, 1};
        auto want = brute_price_one_period(tree, claim);
        REQUIRE(want.has_value());
        CHECK(price_all_routes(tree, claim) == *want);
    }

    std::mt19937 rng(60601);
    for (int trial = 0; trial < 40; ++trial) {
        bool breakit = trial % 4 == 3;
        auto pr = make_proto(rng, 2, breakit, 1);
        auto tree = proto_tree(pr, trial % 2 ? Rational(3, 2) : Rational(5, 4));
        auto claim = random_claim(rng, tree);

        auto want = brute_price_one_period(tree, claim);
        auto primal = price_primal(tree, claim);
        auto dual = price_dual(tree, claim);
        CHECK(primal.arbitrage == !want.has_value());
        CHECK(dual.no_price_system == !want.has_value());
        if (!want) continue;
        CHECK(primal.price == *want);
        CHECK(dual.price == *want);
        auto en = build_enlarged(tree, 3, false);
        CHECK(price_enlarged(en, claim).price == *want);
        CHECK(backward_induction(en, claim).price == *want);
    }
}

TEST_CASE("every route shifts by added cash") {
    std::mt19937 rng(71309);
    for (int trial = 0; trial < 10; ++trial) {
        auto pr = make_proto(rng, 2, false, 2);
        auto tree = proto_tree(pr, Rational(3, 2));
        auto claim = random_claim(rng, tree);
        Rational a = trial % 2 ? Rational(5, 2) : Rational(-3);
        auto shifted = shift_cash(tree, claim, a);

        CHECK(price_all_routes(tree, shifted) == price_all_routes(tree, claim) + a);
    }
}

TEST_CASE("transfers fund the holding change at the worst grid price") {
    TreeBuilder b;
    b.add_root(build_cone(BidAskSpec::uniform({1}, 2)));
    b.add_child(0, build_cone(BidAskSpec::uniform({1}, 2)));
    b.set_kernels(0, {{1}});
    auto tree = b.finish();
    auto en = build_enlarged(tree, 3, false);

    std::vector<Vec> H(tree.nodes.size(), Vec{});
    H[0] = {1, 0};
    auto eta = eta_from_H(en, H);
    CHECK(eta[0] == Vec{1, -2});
    CHECK(eta[1] == Vec{0, 0});

    H[0] = {-1, 0};
    eta = eta_from_H(en, H);
    CHECK(eta[0] == Vec{-1, Rational(1, 2)});

    H[0] = {0, 0};
    eta = eta_from_H(en, H);
    CHECK(eta[0] == Vec{0, 0});
}

TEST_CASE("all routes agree across random markets") {
    std::mt19937 rng(82817);
    for (int trial = 0; trial < 30; ++trial) {
        bool breakit = trial % 3 == 2;
        size_t d = trial % 2 ? 3 : 2;
        size_t max_T = d == 3 ? 2 : 3;
        auto pr = make_proto(rng, d, breakit, max_T);
        auto tree = proto_tree(pr, Rational(5, 4), trial % 2 == 0);
        auto claim = random_claim(rng, tree);
        auto en = build_enlarged(tree, 3, false);

        auto primal = price_primal(tree, claim);
        auto dual = price_dual(tree, claim);
        auto enl = price_enlarged(en, claim);
        CHECK(primal.arbitrage == dual.no_price_system);
        CHECK(enl.arbitrage == primal.arbitrage);
        if (breakit) {
            CHECK_THROWS_AS(backward_induction(en, claim), NAViolated);
            continue;
        }
        REQUIRE_FALSE(primal.arbitrage);
        CHECK(dual.price == primal.price);
        CHECK(enl.price == primal.price);
        auto dp = backward_induction(en, claim);
        CHECK(dp.price == primal.price);
        CHECK(primal.cert.valid);
        CHECK(dp.cert.valid);

        HedgeCertificate again = dp.cert;
        CHECK(verify_hedge(tree, claim, again));
        again.price -= 1;
        CHECK_FALSE(verify_hedge(tree, claim, again));
    }
}

TEST_CASE("prices are monotone under terminal dominance") {
    std::mt19937 rng(93103);
    std::uniform_int_distribution<int> bump(0, 2);
    for (int trial = 0; trial < 12; ++trial) {
        auto pr = make_proto(rng, 2, false, 2);
        auto tree = proto_tree(pr, Rational(3, 2));
        auto lower = random_claim(rng, tree);
        Claim upper = lower;
        for (const auto& n : tree.nodes) {
            if (!tree.is_terminal(n.id)) continue;
            for (size_t i = 0; i < tree.d; ++i) upper.xi[n.id][i] += bump(rng);
        }

        CHECK(price_primal(tree, upper).price >= price_primal(tree, lower).price);
    }
}

TEST_CASE("static instruments never raise the price") {
    std::mt19937 rng(10427);
    std::uniform_int_distribution<int> coef(-2, 2);
    for (int trial = 0; trial < 12; ++trial) {
        auto pr = make_proto(rng, 2, false, 2);
        auto tree = proto_tree(pr, Rational(3, 2));
        auto claim = random_claim(rng, tree);
        Rational base = price_primal(tree, claim).price;

        Claim with_one = claim;
        StaticInstrument inst;
        inst.zeta.assign(tree.nodes.size(), Vec{});
        bool nonzero = false;
        for (const auto& n : tree.nodes) {
            if (!tree.is_terminal(n.id)) continue;
            Vec z(tree.d);
            for (auto& x : z) x = coef(rng);
            nonzero = nonzero || !vec_is_zero(z);
            inst.zeta[n.id] = std::move(z);
        }
        if (!nonzero) inst.zeta[tree.nodes.size() - 1][0] = 1;
        inst.cost = trial % 2 ? Rational(2) : Rational(1, 2);
        with_one.statics.push_back(inst);

        auto primal = price_primal(tree, with_one);
        auto dual = price_dual(tree, with_one);
        CHECK(primal.arbitrage == dual.no_price_system);
        if (primal.arbitrage) {
            CHECK_FALSE(robustness_check(tree, with_one));
            continue;
        }
        CHECK(primal.price <= base);
        CHECK(dual.price == primal.price);
        CHECK(primal.cert.valid);

        Claim with_two = with_one;
        inst.cost += 1;
        with_two.statics.push_back(inst);
        auto two = price_primal(tree, with_two);
        if (!two.arbitrage) CHECK(two.price <= primal.price);
    }
}

TEST_CASE("a zero-premium copy of the claim pins its price at zero") {
    auto tree = binomial(Rational(3, 2), 1, 2, Rational(1, 2));
    Claim claim = bare_claim(tree);
    claim.xi[1] = {0, 1};
    REQUIRE(price_primal(tree, claim).price > 0);

    StaticInstrument inst;
    inst.zeta = claim.xi;
    inst.cost = 0;
    claim.statics.push_back(inst);

    CHECK(price_primal(tree, claim).price == 0);
    CHECK(price_dual(tree, claim).price == 0);
    auto en = build_enlarged(tree, 3, false);
    CHECK(price_enlarged(en, claim).price == 0);
}

TEST_CASE("robustness probes a unit bond against its premium") {
    auto tree = binomial(Rational(3, 2), 1, 2, Rational(1, 2));
    Claim claim = bare_claim(tree);
    StaticInstrument bond;
    bond.zeta.assign(tree.nodes.size(), Vec{});
    for (const auto& n : tree.nodes)
        if (tree.is_terminal(n.id)) bond.zeta[n.id] = Vec{0, 1};
    claim.statics.push_back(bond);

    // the bond replicates for exactly 1 unit of cash, so any premium above
    // that leaves both sides of the trade strictly losing
    claim.statics[0].cost = 2;
    CHECK(robustness_check(tree, claim));
    claim.statics[0].cost = 1;
    CHECK_FALSE(robustness_check(tree, claim));
    claim.statics[0].cost = Rational(1, 2);
    CHECK_FALSE(robustness_check(tree, claim));

    // a premium dominating both super-hedge prices never yields a free
    // position either: taking it on only burns cash, so the probe stays
    // strictly positive
    claim.statics[0].cost = 100;
    CHECK(robustness_check(tree, claim));
}

TEST_CASE("robustness failure coincides with an unbounded pricing program") {
    auto tree = binomial(Rational(3, 2), 1, 2, Rational(1, 2));
    Claim claim = bare_claim(tree);
    claim.xi[1] = {0, 1};

    StaticInstrument bond;
    bond.zeta.assign(tree.nodes.size(), Vec{});
    for (const auto& n : tree.nodes)
        if (tree.is_terminal(n.id)) bond.zeta[n.id] = Vec{0, 1};
    bond.cost = Rational(1, 2);
    claim.statics.push_back(bond);

    REQUIRE_FALSE(robustness_check(tree, claim));
    CHECK(price_primal(tree, claim).arbitrage);
    CHECK(price_dual(tree, claim).no_price_system);
}
