// Release acceptance battery.  Each numbered block drives one criterion end
// to end on freshly generated instances and prints a single verdict line;
// the process exits with the number of failed criteria.

#include <chrono>
#include <iostream>
#include <string>
#include <vector>

#include "conehedge/claim.hpp"
#include "conehedge/enlarged.hpp"
#include "conehedge/generate.hpp"
#include "conehedge/oracle.hpp"
#include "conehedge/reports.hpp"
#include "conehedge/superhedge.hpp"

using namespace conehedge;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;
int criterion = 0;

long long ms_since(Clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
}

void verdict(const std::string& name, bool pass, const std::string& detail,
             Clock::time_point t0) {
    ++criterion;
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << criterion << ". " << name;
    if (!detail.empty()) std::cout << ": " << detail;
    std::cout << " (" << ms_since(t0) << " ms)" << std::endl;
    if (!pass) ++failures;
}

std::string tally(int ok, int total, const std::string& bad) {
    std::string s = std::to_string(ok) + "/" + std::to_string(total);
    if (!bad.empty()) s += ", " + bad;
    return s;
}

}  // namespace

int main() {
    // 1. without statics the primal, dual, enlarged and backward-induction
    //    routes return one and the same exact price
    {
        auto t0 = Clock::now();
        const int N = 200;
        int ok = 0;
        std::string bad;
        for (int i = 0; i < N; ++i) {
            GenOptions opt;
            opt.seed = 9000 + static_cast<uint64_t>(i);
            opt.T = 1 + i % 3;
            opt.d = 2 + (i / 3) % 2;
            opt.branching = 1 + (i / 6) % 3;
            opt.kernels = 1 + (i / 18) % 3;
            opt.na2 = Na2Mode::Yes;
            auto inst = generate(opt);
            auto primal = price_primal(inst.tree, inst.claim);
            auto dual = price_dual(inst.tree, inst.claim);
            auto en = build_enlarged(inst.tree, 3, false);
            auto enl = price_enlarged(en, inst.claim);
            bool good = !primal.arbitrage && !dual.no_price_system && !enl.arbitrage &&
                        primal.price == dual.price && enl.price == primal.price;
            if (good) {
                auto dp = backward_induction(en, inst.claim);
                good = dp.price == primal.price;
            }
            if (good)
                ++ok;
            else if (bad.empty())
                bad = "first failure at seed " + std::to_string(opt.seed);
        }
        bool in_budget = ms_since(t0) <= 300000;
        verdict("four pricing routes agree without statics",
                ok == N && in_budget,
                tally(ok, N, bad) + (in_budget ? "" : ", over the five-minute budget"), t0);
    }

    // 2. with robust static instruments the primal and dual prices still
    //    match, and each added instrument can only lower the price
    {
        auto t0 = Clock::now();
        const int N = 100;
        int ok = 0;
        std::string bad;
        for (int i = 0; i < N; ++i) {
            GenOptions opt;
            opt.seed = 11000 + static_cast<uint64_t>(i);
            opt.T = 1 + i % 2;
            opt.d = 2 + (i / 2) % 2;
            opt.branching = 1 + (i / 4) % 3;
            opt.kernels = 1 + i % 2;
            opt.statics = 1 + (i / 12) % 2;
            opt.na2 = Na2Mode::Yes;
            auto inst = generate(opt);
            bool good = robustness_check(inst.tree, inst.claim);
            Rational prev;
            bool have_prev = false;
            for (size_t e = 0; e <= inst.claim.statics.size() && good; ++e) {
                Claim cut = inst.claim;
                cut.statics.resize(e);
                auto primal = price_primal(inst.tree, cut);
                auto dual = price_dual(inst.tree, cut);
                good = !primal.arbitrage && !dual.no_price_system &&
                       primal.price == dual.price;
                if (good && have_prev) good = primal.price <= prev;
                prev = primal.price;
                have_prev = true;
            }
            if (good)
                ++ok;
            else if (bad.empty())
                bad = "first failure at seed " + std::to_string(opt.seed);
        }
        verdict("robust statics keep strong duality and never raise the price",
                ok == N, tally(ok, N, bad), t0);
    }

    // 3. the one-step cone test and the frictionless test on the enlarged
    //    market reach the same verdict on every instance
    {
        auto t0 = Clock::now();
        const int N = 200;
        int ok = 0, holds = 0;
        std::string bad;
        for (int i = 0; i < N; ++i) {
            GenOptions opt;
            opt.seed = 13000 + static_cast<uint64_t>(i);
            opt.T = 1 + i % 3;
            opt.d = 2 + (i / 3) % 2;
            opt.branching = 1 + (i / 6) % 3;
            opt.kernels = 1 + i % 2;
            opt.na2 = i % 2 == 0 ? Na2Mode::Yes : Na2Mode::No;
            auto inst = generate(opt);
            auto na2 = check_na2(inst.tree);
            auto en = build_enlarged(inst.tree, 3, false);
            bool agree = check_na_frictionless(en, false).holds == na2.holds;
            if (na2.holds) ++holds;
            if (agree)
                ++ok;
            else if (bad.empty())
                bad = "disagreement at seed " + std::to_string(opt.seed);
        }
        verdict("both no-arbitrage notions agree",
                ok == N,
                tally(ok, N, bad) + ", " + std::to_string(holds) + " hold / " +
                    std::to_string(N - holds) + " fail",
                t0);
    }

    // 4. cone-side and price-side admissibility verdicts coincide for random
    //    adapted positions
    {
        auto t0 = Clock::now();
        const int N = 50, K = 20;
        int ok = 0;
        std::string bad;
        for (int i = 0; i < N; ++i) {
            GenOptions opt;
            opt.seed = 15000 + static_cast<uint64_t>(i);
            opt.T = 1 + i % 3;
            opt.d = 2 + i % 2;
            opt.branching = 1 + (i / 2) % 3;
            opt.kernels = 1 + i % 2;
            opt.na2 = Na2Mode::Any;
            auto inst = generate(opt);
            auto en = build_enlarged(inst.tree, 3, false);
            SplitMix64 rng(opt.seed * 31 + 7);
            bool good = true;
            for (int k = 0; k < K && good; ++k) {
                std::vector<Vec> zeta(inst.tree.nodes.size());
                for (auto& z : zeta) {
                    z.resize(inst.tree.d);
                    for (auto& x : z) x = Rational(rng.pick(-2, 2));
                }
                auto [lhs, rhs] = check_cone_transfer(en, zeta);
                good = lhs == rhs;
            }
            if (good)
                ++ok;
            else if (bad.empty())
                bad = "disagreement at seed " + std::to_string(opt.seed);
        }
        verdict("cone-side and price-side admissibility verdicts coincide",
                ok == N, tally(ok, N, bad) + " instances x 20 positions", t0);
    }

    // 5. weak duality: whenever both programs are finite, dual <= primal
    {
        auto t0 = Clock::now();
        const int N = 200;
        int finite = 0, violations = 0;
        std::string bad;
        for (int i = 0; i < N; ++i) {
            GenOptions opt;
            opt.seed = 17000 + static_cast<uint64_t>(i);
            opt.T = 1 + i % 3;
            opt.d = 2 + (i / 3) % 2;
            opt.branching = 1 + (i / 6) % 3;
            opt.kernels = 1 + i % 2;
            opt.na2 = Na2Mode::Any;
            auto inst = generate(opt);
            auto primal = price_primal(inst.tree, inst.claim);
            auto dual = price_dual(inst.tree, inst.claim);
            if (primal.arbitrage || dual.no_price_system) continue;
            ++finite;
            if (dual.price > primal.price) {
                ++violations;
                if (bad.empty()) bad = "violation at seed " + std::to_string(opt.seed);
            }
        }
        verdict("weak duality holds on every finite pair",
                violations == 0 && finite > 0,
                std::to_string(finite) + " finite pairs of " + std::to_string(N) +
                    ", " + std::to_string(violations) + " violations" +
                    (bad.empty() ? "" : ", " + bad),
                t0);
    }

    // 6. the exhaustive one-period oracle reproduces every route and verdict
    {
        auto t0 = Clock::now();
        const int N = 100;
        int ok = 0;
        std::string bad;
        for (int i = 0; i < N; ++i) {
            GenOptions opt;
            opt.seed = 19000 + static_cast<uint64_t>(i);
            opt.T = 1;
            opt.d = 2;
            opt.branching = 1 + i % 3;
            opt.kernels = 1 + i % 2;
            opt.na2 = i % 3 == 0 ? Na2Mode::No : (i % 3 == 1 ? Na2Mode::Yes : Na2Mode::Any);
            auto inst = generate(opt);
            auto want = brute_price_one_period(inst.tree, inst.claim);
            auto primal = price_primal(inst.tree, inst.claim);
            auto dual = price_dual(inst.tree, inst.claim);
            auto en = build_enlarged(inst.tree, 3, false);
            auto enl = price_enlarged(en, inst.claim);
            bool na2 = check_na2(inst.tree).holds;
            bool dp_refused = false;
            Rational dp_price;
            try {
                dp_price = backward_induction(en, inst.claim).price;
            } catch (const NAViolated&) {
                dp_refused = true;
            }
            // the backward recursion is the one route defined only under the
            // one-step condition; it must refuse exactly there and nowhere else
            bool good = dp_refused == !na2;
            if (want.has_value()) {
                good = good && !primal.arbitrage && !dual.no_price_system &&
                       !enl.arbitrage && primal.price == *want && dual.price == *want &&
                       enl.price == *want && (dp_refused || dp_price == *want);
            } else {
                good = good && primal.arbitrage && dual.no_price_system && enl.arbitrage;
            }
            good = good && brute_na2(inst.tree) == na2;
            if (good)
                ++ok;
            else if (bad.empty())
                bad = "mismatch at seed " + std::to_string(opt.seed);
        }
        verdict("exhaustive one-period oracle matches all routes and verdicts",
                ok == N, tally(ok, N, bad), t0);
    }

    // 7. frictionless collapse: the binomial call prices at exactly 1/3
    {
        auto t0 = Clock::now();
        TreeBuilder b;
        b.add_root(build_cone(BidAskSpec::frictionless({Rational(1)}), true));
        b.add_child(0, build_cone(BidAskSpec::frictionless({Rational(2)}), true));
        b.add_child(0, build_cone(BidAskSpec::frictionless({Rational(1, 2)}), true));
        b.set_kernels(0, {Vec{Rational(1, 2), Rational(1, 2)}});
        for (size_t n = 0; n < 3; ++n) b.set_frictionless(n, true);
        auto tree = b.finish();
        Claim claim;
        claim.xi.assign(3, Vec{});
        claim.xi[1] = Vec{Rational(0), Rational(1)};
        claim.xi[2] = Vec{Rational(0), Rational(0)};
        Rational third(1, 3);
        auto primal = price_primal(tree, claim);
        auto dual = price_dual(tree, claim);
        auto en = build_enlarged(tree, 3, false);
        auto enl = price_enlarged(en, claim);
        auto dp = backward_induction(en, claim);
        auto want = brute_price_one_period(tree, claim);
        bool good = !primal.arbitrage && primal.price == third && dual.price == third &&
                    enl.price == third && dp.price == third && want && *want == third;
        verdict("frictionless binomial call prices at exactly 1/3", good,
                good ? "all routes and the oracle"
                     : "got " + format_rational(primal.price) + " on the primal route",
                t0);
    }

    // 8. every emitted hedge certificate survives independent re-verification
    {
        auto t0 = Clock::now();
        const int N = 100;
        int ok = 0;
        std::string bad;
        for (int i = 0; i < N; ++i) {
            GenOptions opt;
            opt.seed = 21000 + static_cast<uint64_t>(i);
            opt.T = 1 + i % 2;
            opt.d = 2 + (i / 2) % 2;
            opt.branching = 1 + (i / 4) % 3;
            opt.kernels = 1 + i % 2;
            opt.statics = i % 3;
            opt.na2 = Na2Mode::Yes;
            auto inst = generate(opt);
            auto primal = price_primal(inst.tree, inst.claim);
            HedgeCertificate cert = primal.cert;
            bool good = !primal.arbitrage && cert.valid && cert.price == primal.price &&
                        verify_hedge(inst.tree, inst.claim, cert);
            if (good && inst.claim.statics.empty()) {
                auto en = build_enlarged(inst.tree, 3, false);
                auto dp = backward_induction(en, inst.claim);
                HedgeCertificate dcert = dp.cert;
                good = dcert.price == dp.price && verify_hedge(inst.tree, inst.claim, dcert);
            }
            if (good)
                ++ok;
            else if (bad.empty())
                bad = "certificate rejected at seed " + std::to_string(opt.seed);
        }
        verdict("hedge certificates re-verify from scratch", ok == N, tally(ok, N, bad), t0);
    }

    // 9. cash translation shifts the price one for one, and reports are
    //    byte-identical across independent runs
    {
        auto t0 = Clock::now();
        const int N = 50;
        int ok = 0;
        std::string bad;
        const Rational shifts[5] = {Rational(-2), Rational(-1, 2), Rational(1, 3),
                                    Rational(1), Rational(7, 4)};
        for (int i = 0; i < N; ++i) {
            GenOptions opt;
            opt.seed = 23000 + static_cast<uint64_t>(i);
            opt.T = 1 + i % 2;
            opt.d = 2 + (i / 2) % 2;
            opt.branching = 1 + (i / 4) % 3;
            opt.kernels = 1 + i % 2;
            opt.statics = i % 2;
            opt.na2 = Na2Mode::Yes;
            auto inst = generate(opt);
            auto base_p = price_primal(inst.tree, inst.claim);
            auto base_d = price_dual(inst.tree, inst.claim);
            bool good = !base_p.arbitrage && !base_d.no_price_system;
            for (const auto& a : shifts) {
                if (!good) break;
                Claim shifted = shift_cash(inst.tree, inst.claim, a);
                auto p = price_primal(inst.tree, shifted);
                auto d = price_dual(inst.tree, shifted);
                good = !p.arbitrage && p.price == base_p.price + a &&
                       !d.no_price_system && d.price == base_d.price + a;
            }
            if (good)
                ++ok;
            else if (bad.empty())
                bad = "shift mismatch at seed " + std::to_string(opt.seed);
        }

        int stable = 0;
        const int M = 10;
        for (int j = 0; j < M; ++j) {
            auto pass = [&](int which) -> std::string {
                GenOptions opt;
                opt.seed = 25000 + static_cast<uint64_t>(j);
                opt.T = 1 + j % 2;
                opt.d = 2 + j % 2;
                opt.branching = 1 + j % 3;
                opt.kernels = 1 + j % 2;
                opt.na2 = Na2Mode::Yes;
                auto inst = generate(opt);
                MarketSpecFile spec;
                spec.tree = std::move(inst.tree);
                spec.claim = std::move(inst.claim);
                spec.note = inst.note;
                std::string text = emit_market(spec);
                auto parsed = parse_market(text);
                std::string digest = digest_hex(emit_market(parsed));
                std::string out = text;
                out += price_report(parsed, digest, "m.json", "all", 3).dump(2);
                if (which == 0 || j % 4 == 0)
                    out += verify_report(parsed, digest, "m.json", 3, parsed.tree.d == 2 &&
                                                                          parsed.tree.T == 1)
                               .dump(2);
                return out;
            };
            std::string first = pass(j % 4 == 0 ? 0 : 1);
            std::string second = pass(j % 4 == 0 ? 0 : 1);
            if (!first.empty() && first == second) ++stable;
        }
        bool stable_ok = stable == M;
        verdict("cash translation is exact and reports are byte-stable",
                ok == N && stable_ok,
                tally(ok, N, bad) + " shifted instances, " + std::to_string(stable) + "/" +
                    std::to_string(M) + " byte-stable report pairs",
                t0);
    }

    std::cout << (failures == 0 ? "all criteria passed" : "criteria failed") << std::endl;
    return failures;
}
