#pragma once

// Report builders shared by the command-line tool and the acceptance suite.
// Each takes a parsed market plus the flags that affect the result and
// returns the full JSON document; serialization (dump) is byte-stable because
// ordered_json preserves insertion order and all numbers are ratio strings.

#include <string>

#include "conehedge/arbitrage.hpp"
#include "conehedge/io.hpp"
#include "conehedge/oracle.hpp"
#include "conehedge/superhedge.hpp"

namespace conehedge {

namespace report_detail {

inline Json vec_json(const Vec& v) {
    Json out = Json::array();
    for (const auto& x : v) out.push_back(format_rational(x));
    return out;
}

inline Json report_shell(const std::string& command, const std::string& digest) {
    Json doc;
    doc["schema"] = 1;
    doc["command"] = command;
    doc["instance"] = digest;
    doc["deviations"] = Json::array({kClosureNote});
    return doc;
}

inline Json price_route_json(const ScenarioTree& tree, const Claim& claim,
                             const EnlargedTree& en, const std::string& route,
                             bool lenient_dp) {
    Json r;
    if (route == "primal") {
        auto res = price_primal(tree, claim);
        if (res.arbitrage)
            r["arbitrage"] = true;
        else
            r["value"] = format_rational(res.price);
    } else if (route == "dual") {
        auto res = price_dual(tree, claim);
        if (res.no_price_system)
            r["arbitrage"] = true;
        else
            r["value"] = format_rational(res.price);
    } else if (route == "enlarged") {
        auto res = price_enlarged(en, claim);
        if (res.arbitrage)
            r["arbitrage"] = true;
        else
            r["value"] = format_rational(res.price);
    } else {
        if (lenient_dp && (!claim.statics.empty() || tree.d > 3)) {
            r["skipped"] = !claim.statics.empty()
                               ? "backward induction prices bare claims only"
                               : "backward induction supports at most two risky assets";
            return r;
        }
        try {
            auto res = backward_induction(en, claim);
            r["value"] = format_rational(res.price);
        } catch (const NAViolated&) {
            r["undefined"] =
                "the one-step no-arbitrage condition fails, so the backward "
                "recursion has no finite value table";
        }
    }
    return r;
}

}  // namespace report_detail

inline Json price_report(const MarketSpecFile& spec, const std::string& digest,
                         const std::string& file, const std::string& route,
                         size_t theta_res) {
    using namespace report_detail;
    auto en = build_enlarged(spec.tree, theta_res, false);
    Json doc = report_shell(
        "price --route " + route + " --theta-res " + std::to_string(theta_res) + " " + file,
        digest);
    Json results;
    if (route == "all") {
        for (const char* rt : {"primal", "dual", "enlarged", "dp"})
            results[rt] = price_route_json(spec.tree, spec.claim, en, rt, true);
        bool all_values = true;
        bool gap_zero = true;
        std::string first;
        for (const auto& item : results.items()) {
            if (item.value().contains("skipped") || item.value().contains("undefined"))
                continue;
            if (!item.value().contains("value")) {
                all_values = false;
                continue;
            }
            std::string v = item.value()["value"].get<std::string>();
            if (first.empty())
                first = v;
            else
                gap_zero = gap_zero && v == first;
        }
        if (all_values && !first.empty())
            results["duality_gap"] = gap_zero ? "0" : "nonzero: route disagreement, file a bug";
    } else {
        results[route] = price_route_json(spec.tree, spec.claim, en, route, false);
    }
    doc["results"] = std::move(results);
    return doc;
}

inline Json hedge_report(const MarketSpecFile& spec, const std::string& digest,
                         const std::string& file) {
    using namespace report_detail;
    Json doc = report_shell("hedge " + file, digest);
    auto res = price_primal(spec.tree, spec.claim);
    if (res.arbitrage) {
        doc["results"] = Json{{"arbitrage", true}};
        return doc;
    }
    doc["results"] = Json{{"price", format_rational(res.price)}};
    Json cert;
    cert["price"] = format_rational(res.price);
    Json ell = Json::array();
    for (const auto& x : res.cert.ell) ell.push_back(format_rational(x));
    cert["ell"] = std::move(ell);
    Json eta = Json::array();
    for (const auto& n : spec.tree.nodes) {
        if (res.cert.eta[n.id].empty()) continue;
        Json je;
        je["node"] = n.id;
        je["eta"] = vec_json(res.cert.eta[n.id]);
        eta.push_back(std::move(je));
    }
    cert["eta"] = std::move(eta);
    Json residuals = Json::array();
    for (const auto& n : spec.tree.nodes) {
        if (!spec.tree.is_terminal(n.id) || res.cert.residuals[n.id].empty()) continue;
        Json jr;
        jr["node"] = n.id;
        jr["residual"] = vec_json(res.cert.residuals[n.id]);
        residuals.push_back(std::move(jr));
    }
    cert["residuals"] = std::move(residuals);
    cert["valid"] = res.cert.valid;
    doc["certificate"] = std::move(cert);
    return doc;
}

inline Json check_na2_report(const MarketSpecFile& spec, const std::string& digest,
                             const std::string& file) {
    using namespace report_detail;
    Json doc = report_shell("check-na2 " + file, digest);
    auto rep = check_na2(spec.tree);
    Json results;
    results["holds"] = rep.holds;
    if (!rep.holds) {
        results["failing_node"] = *rep.failing_node;
        results["witness"] = vec_json(*rep.witness);
    }
    doc["results"] = std::move(results);
    return doc;
}

inline Json check_na_report(const MarketSpecFile& spec, const std::string& digest,
                            const std::string& file, size_t theta_res) {
    using namespace report_detail;
    Json doc = report_shell(
        "check-na --theta-res " + std::to_string(theta_res) + " " + file, digest);
    auto en = build_enlarged(spec.tree, theta_res, false);
    auto rep = check_na_frictionless(en);
    Json results;
    results["holds"] = rep.holds;
    if (rep.holds) {
        Json cert;
        Json mass = Json::array();
        for (const auto& n : spec.tree.nodes) {
            for (size_t j = 0; j < rep.mass[n.id].size(); ++j) {
                Json jm;
                jm["node"] = n.id;
                jm["theta"] = j;
                jm["mass"] = format_rational(rep.mass[n.id][j]);
                mass.push_back(std::move(jm));
            }
        }
        cert["mass"] = std::move(mass);
        Json flows = Json::array();
        for (const auto& n : spec.tree.nodes) {
            for (size_t j = 0; j < rep.kernel[n.id].size(); ++j) {
                for (size_t c = 0; c < rep.kernel[n.id][j].size(); ++c) {
                    for (size_t jc = 0; jc < rep.kernel[n.id][j][c].size(); ++jc) {
                        const Rational& w = rep.kernel[n.id][j][c][jc];
                        if (w == 0) continue;
                        Json jf;
                        jf["node"] = n.id;
                        jf["theta"] = j;
                        jf["child"] = n.children[c];
                        jf["child_theta"] = jc;
                        jf["weight"] = format_rational(w);
                        flows.push_back(std::move(jf));
                    }
                }
            }
        }
        cert["kernel"] = std::move(flows);
        doc["results"] = std::move(results);
        doc["certificate"] = std::move(cert);
    } else {
        results["failing_node"] = rep.failing_node;
        results["failing_theta"] = rep.failing_theta;
        results["strategy"] = vec_json(rep.strategy);
        doc["results"] = std::move(results);
    }
    return doc;
}

inline Json find_scps_report(const MarketSpecFile& spec, const std::string& digest,
                             const std::string& file) {
    using namespace report_detail;
    Json doc = report_shell("find-scps " + file, digest);
    auto ps = find_scps(spec.tree);
    Json results;
    results["present"] = ps.has_value();
    if (ps) {
        results["strict_everywhere"] = ps->strict_everywhere;
        Json sys = Json::array();
        for (const auto& n : spec.tree.nodes) {
            if (ps->mass[n.id] == 0) continue;
            Json jn;
            jn["node"] = n.id;
            jn["mass"] = format_rational(ps->mass[n.id]);
            jn["Z"] = vec_json(ps->Z[n.id]);
            jn["interior"] = ps->interior[n.id] == 1;
            sys.push_back(std::move(jn));
        }
        results["system"] = std::move(sys);
    }
    doc["results"] = std::move(results);
    return doc;
}

inline Json robustness_report(const MarketSpecFile& spec, const std::string& digest,
                              const std::string& file) {
    using namespace report_detail;
    Json doc = report_shell("robustness-check " + file, digest);
    doc["results"] = Json{{"robust", robustness_check(spec.tree, spec.claim)}};
    return doc;
}

inline Json verify_report(const MarketSpecFile& spec, const std::string& digest,
                          const std::string& file, size_t theta_res, bool oracle) {
    using namespace report_detail;
    Json doc = report_shell("verify" + std::string(oracle ? " --oracle" : "") +
                                " --theta-res " + std::to_string(theta_res) + " " + file,
                            digest);
    const ScenarioTree& tree = spec.tree;
    const Claim& claim = spec.claim;
    Json checks = Json::array();
    bool all = true;
    auto record = [&](const std::string& name, bool pass, const std::string& detail) {
        Json c;
        c["check"] = name;
        c["outcome"] = pass ? "pass" : "fail";
        if (!detail.empty()) c["detail"] = detail;
        checks.push_back(std::move(c));
        all = all && pass;
    };
    auto skip = [&](const std::string& name, const std::string& why) {
        Json c;
        c["check"] = name;
        c["outcome"] = "skipped";
        c["detail"] = why;
        checks.push_back(std::move(c));
    };

    auto na2 = check_na2(tree);
    auto en = build_enlarged(tree, theta_res, false);
    try {
        bool cross = check_na_frictionless(en, false).holds == na2.holds;
        record("no-arbitrage notions agree", cross, na2.holds ? "both hold" : "both fail");
    } catch (const EmptyInteriorGrid& e) {
        skip("no-arbitrage notions agree", e.what());
    }
    record("price system search matches the verdict", find_scps(tree).has_value() == na2.holds,
           "");

    auto primal = price_primal(tree, claim);
    auto dual = price_dual(tree, claim);
    record("primal and dual agree on boundedness", primal.arbitrage == dual.no_price_system,
           "");
    if (!primal.arbitrage && !dual.no_price_system) {
        record("primal equals dual", primal.price == dual.price, format_rational(primal.price));
        auto enl = price_enlarged(en, claim);
        record("enlarged route agrees", !enl.arbitrage && enl.price == primal.price, "");
        if (!claim.statics.empty() || tree.d > 3) {
            skip("backward induction agrees", "route undefined for this instance");
        } else if (!na2.holds) {
            skip("backward induction agrees", "the one-step no-arbitrage condition fails");
        } else {
            try {
                auto dp = backward_induction(en, claim);
                record("backward induction agrees", dp.price == primal.price, "");
            } catch (const NAViolated& e) {
                record("backward induction agrees", false, e.what());
            }
        }
        record("hedge certificate re-verifies", verify_hedge(tree, claim, primal.cert), "");
        if (!claim.statics.empty()) {
            Claim bare = claim;
            bare.statics.clear();
            auto base = price_primal(tree, bare);
            record("statics never raise the price", base.arbitrage || primal.price <= base.price,
                   "");
            record("statics pass the robustness screen", robustness_check(tree, claim), "");
        }
    } else {
        skip("primal equals dual", "no finite price");
    }

    if (oracle) {
        if (tree.d == 2 && tree.T == 1 && claim.statics.empty()) {
            auto want = brute_price_one_period(tree, claim);
            bool ok = want.has_value() ? (!primal.arbitrage && primal.price == *want)
                                       : primal.arbitrage;
            record("hull oracle agrees", ok,
                   want ? format_rational(*want) : std::string("no price system"));
            record("exhaustive no-arbitrage oracle agrees", brute_na2(tree) == na2.holds, "");
        } else {
            skip("hull oracle agrees", "oracle covers one-period two-asset markets only");
        }
    }

    doc["results"] = Json::object();
    doc["results"]["checks"] = std::move(checks);
    doc["results"]["all_passed"] = all;
    return doc;
}

}  // namespace conehedge
