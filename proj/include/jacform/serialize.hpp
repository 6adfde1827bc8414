#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "jacform/expansion.hpp"

namespace jacform {

inline nlohmann::ordered_json expansion_to_json(const JacobiExpansion& phi) {
    const FormSignature& s = phi.signature();
    nlohmann::ordered_json sig;
    sig["k"] = s.weight();
    sig["m"] = s.index();
    sig["N"] = s.lattice();
    sig["char_disc"] = s.character_disc();
    if (s.level() != s.lattice() * s.lattice()) sig["gamma"] = s.level();
    nlohmann::ordered_json j;
    j["signature"] = std::move(sig);
    j["bound"] = phi.bound();
    nlohmann::ordered_json coeffs = nlohmann::ordered_json::array();
    for (const auto& [key, v] : phi.coefficients()) {
        coeffs.push_back({key.D, key.rho, v.str()});
    }
    j["coeffs"] = std::move(coeffs);
    return j;
}

inline JacobiExpansion expansion_from_json(const nlohmann::json& j) {
    try {
        const auto& sig = j.at("signature");
        unsigned k = sig.at("k").get<unsigned>();
        std::uint64_t m = sig.at("m").get<std::uint64_t>();
        std::uint64_t N = sig.at("N").get<std::uint64_t>();
        long long char_disc = sig.contains("char_disc") ? sig.at("char_disc").get<long long>() : 1;
        std::uint64_t level = sig.contains("gamma") ? sig.at("gamma").get<std::uint64_t>() : N * N;
        std::optional<QuadCharacter> chi;
        if (char_disc != 1) chi = QuadCharacter(char_disc);
        FormSignature signature(k, m, N, chi, level);
        std::uint64_t bound = j.at("bound").get<std::uint64_t>();
        JacobiExpansion phi(signature, bound);
        for (const auto& entry : j.at("coeffs")) {
            if (!entry.is_array() || entry.size() != 3)
                throw ConsistencyError("expansion: each coefficient must be [D, rho, value]");
            long long D = entry.at(0).get<long long>();
            long long rho = entry.at(1).get<long long>();
            Rational v = Rational::parse(entry.at(2).get<std::string>());
            phi.set_coeff_key(D, rho, v);
        }
        phi.seal();
        return phi;
    } catch (const nlohmann::json::exception& e) {
        throw ConsistencyError(std::string("expansion: malformed document: ") + e.what());
    } catch (const ArgumentError& e) {
        throw ConsistencyError(std::string("expansion: invalid data: ") + e.what());
    }
}

// One row per stored orbit, (|D|, rho) ascending.
inline std::string expansion_to_csv(const JacobiExpansion& phi) {
    std::ostringstream os;
    os << "D,rho,numerator,denominator\n";
    for (const auto& [key, v] : phi.coefficients()) {
        os << key.D << "," << key.rho << "," << v.numerator().get_str() << ","
           << v.denominator().get_str() << "\n";
    }
    return os.str();
}

inline void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot open for writing: " + path);
    out << contents;
    if (!out) throw ArgumentError("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_expansion(const std::string& path, const JacobiExpansion& phi) {
    write_text_file(path, expansion_to_json(phi).dump(1) + "\n");
}

inline JacobiExpansion read_expansion(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConsistencyError(std::string("expansion: invalid JSON in ") + path + ": " + e.what());
    }
    return expansion_from_json(j);
}

}  // namespace jacform
