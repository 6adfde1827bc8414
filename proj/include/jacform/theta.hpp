#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "jacform/expansion.hpp"

namespace jacform {

// The 2m coefficient lists h_mu of the theta decomposition
// phi = sum_mu h_mu theta_{m,mu}, with c_mu(D) = c((mu^2 - D)/4m, mu).
struct ThetaComponents {
    std::uint64_t m = 1;
    std::uint64_t bound = 0;
    // components[mu] lists (D, c_mu(D)) with |D| ascending, 0 <= mu < 2m
    std::vector<std::vector<std::pair<long long, Rational>>> components;
};

// With (D, rho) storage the decomposition is a re-indexing by rho.
inline ThetaComponents decompose(const JacobiExpansion& phi) {
    const FormSignature& s = phi.signature();
    if (s.lattice() != 1) throw ArgumentError("decompose: lattice scale must be 1");
    ThetaComponents tc;
    tc.m = s.index();
    tc.bound = phi.bound();
    tc.components.assign(2 * tc.m, {});
    for (const auto& [key, v] : phi.coefficients()) {
        tc.components[key.rho].emplace_back(key.D, v);
    }
    return tc;
}

inline JacobiExpansion reconstruct(const ThetaComponents& tc, const FormSignature& sig) {
    if (sig.lattice() != 1) throw ArgumentError("reconstruct: lattice scale must be 1");
    if (sig.index() != tc.m) throw ArgumentError("reconstruct: signature index mismatch");
    if (tc.components.size() != 2 * tc.m)
        throw ConsistencyError("reconstruct: expected exactly 2m component lists");
    JacobiExpansion phi(sig, tc.bound);
    for (std::uint64_t mu = 0; mu < tc.components.size(); ++mu) {
        for (const auto& [D, v] : tc.components[mu]) {
            try {
                phi.set_coeff_key(D, static_cast<long long>(mu), v);
            } catch (const ArgumentError& e) {
                throw ConsistencyError(std::string("reconstruct: ") + e.what());
            }
        }
    }
    phi.seal();
    return phi;
}

inline nlohmann::ordered_json theta_to_json(const ThetaComponents& tc) {
    nlohmann::ordered_json j;
    j["m"] = tc.m;
    j["bound"] = tc.bound;
    nlohmann::ordered_json comps = nlohmann::ordered_json::object();
    for (std::uint64_t mu = 0; mu < tc.components.size(); ++mu) {
        nlohmann::ordered_json list = nlohmann::ordered_json::array();
        for (const auto& [D, v] : tc.components[mu]) {
            list.push_back(nlohmann::ordered_json::array({D, v.str()}));
        }
        comps[std::to_string(mu)] = std::move(list);
    }
    j["components"] = std::move(comps);
    return j;
}

inline ThetaComponents theta_from_json(const nlohmann::ordered_json& j) {
    try {
        ThetaComponents tc;
        tc.m = j.at("m").get<std::uint64_t>();
        tc.bound = j.at("bound").get<std::uint64_t>();
        tc.components.assign(2 * tc.m, {});
        const auto& comps = j.at("components");
        for (auto it = comps.begin(); it != comps.end(); ++it) {
            std::uint64_t mu = std::stoull(it.key());
            if (mu >= 2 * tc.m) throw ConsistencyError("theta_from_json: residue out of range");
            for (const auto& entry : it.value()) {
                tc.components[mu].emplace_back(entry.at(0).get<long long>(),
                                               Rational::parse(entry.at(1).get<std::string>()));
            }
        }
        return tc;
    } catch (const nlohmann::json::exception& e) {
        throw ConsistencyError(std::string("theta_from_json: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConsistencyError(std::string("theta_from_json: ") + e.what());
    }
}

}  // namespace jacform
