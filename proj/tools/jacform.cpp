#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jacform/eisenstein.hpp"
#include "jacform/indivisibility.hpp"
#include "jacform/operators.hpp"
#include "jacform/serialize.hpp"
#include "jacform/theta.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_negative = 1;  // mathematically negative result
constexpr int exit_usage = 2;

jacform::LocalConditions parse_conditions(const std::vector<std::string>& specs) {
    jacform::LocalConditions conds;
    for (const std::string& s : specs) {
        std::size_t colon = s.find(':');
        if (colon == std::string::npos)
            throw jacform::ArgumentError("condition '" + s + "' is not of the form p:+1 or p:-1");
        std::uint64_t p = 0;
        int eps = 0;
        try {
            p = std::stoull(s.substr(0, colon));
        } catch (const std::exception&) {
            throw jacform::ArgumentError("condition '" + s + "' has a malformed prime");
        }
        std::string sign = s.substr(colon + 1);
        if (sign == "1" || sign == "+1") {
            eps = 1;
        } else if (sign == "-1") {
            eps = -1;
        } else {
            throw jacform::ArgumentError("condition '" + s + "' has a malformed sign");
        }
        conds.signs.emplace_back(p, eps);
    }
    return conds;
}

std::string format_eigenvalue(const jacform::Rational& v) {
    return v.is_integer() ? v.numerator().get_str() : v.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact arithmetic for Jacobi-form Fourier expansions"};
    app.set_config("--config", "", "TOML-style config file; flags override config values");
    app.require_subcommand(1);

    // eisenstein
    auto* eis = app.add_subcommand("eisenstein", "build an Eisenstein series expansion");
    unsigned eis_k = 0;
    std::uint64_t eis_m = 1;
    std::uint64_t eis_bound = 0;
    std::string eis_out;
    std::string eis_format = "json";
    eis->add_option("--k", eis_k, "weight (even, at least 4)")->required();
    eis->add_option("--m", eis_m, "index")->capture_default_str();
    eis->add_option("--bound", eis_bound, "|D| truncation bound (at least 4)")->required();
    eis->add_option("--out", eis_out, "output file")->required();
    eis->add_option("--format", eis_format, "output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();

    // hecke
    auto* hec = app.add_subcommand("hecke", "apply T_p to a stored expansion");
    std::string hec_in;
    std::string hec_out;
    std::uint64_t hec_p = 0;
    bool hec_verify = false;
    hec->add_option("--in", hec_in, "input expansion file")->required();
    hec->add_option("--p", hec_p, "Hecke prime")->required();
    hec->add_option("--out", hec_out, "write the transformed expansion here");
    hec->add_flag("--verify-eigen", hec_verify, "certify an eigenvalue instead of writing");

    // scan
    auto* scn = app.add_subcommand("scan", "scan fundamental discriminants for nu_ell = 0");
    std::string scn_in;
    std::string scn_out;
    std::string scn_checkpoint;
    std::string scn_format = "json";
    std::uint64_t scn_ell = 0;
    std::uint64_t scn_bound = 0;
    unsigned scn_threads = 0;
    std::vector<std::string> scn_conds;
    std::vector<std::uint64_t> scn_probes = {5, 7, 11, 13};
    scn->add_option("--in", scn_in, "input expansion file")->required();
    scn->add_option("--ell", scn_ell, "valuation prime")->required();
    scn->add_option("--bound", scn_bound, "|D| limit (0: expansion bound)")
        ->capture_default_str();
    scn->add_option("--cond", scn_conds, "local condition p:+1 or p:-1 (repeatable)");
    scn->add_option("--out", scn_out, "report output file")->required();
    scn->add_option("--format", scn_format, "report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    scn->add_option("--threads", scn_threads, "worker count (0: available parallelism)")
        ->capture_default_str();
    scn->add_option("--checkpoint", scn_checkpoint, "resumable state file");
    scn->add_option("--probes", scn_probes, "eigenvalue probe primes")->capture_default_str();

    // reduce
    auto* red = app.add_subcommand("reduce", "reduce (n, r) to a fundamental discriminant");
    std::string red_in;
    long long red_n = 0;
    long long red_r = 0;
    red->add_option("--in", red_in, "input expansion file")->required();
    red->add_option("--n", red_n, "exponent of q")->required();
    red->add_option("--r", red_r, "exponent of zeta")->required();

    // theta
    auto* tht = app.add_subcommand("theta", "write the theta decomposition");
    std::string tht_in;
    std::string tht_out;
    tht->add_option("--in", tht_in, "input expansion file")->required();
    tht->add_option("--out", tht_out, "output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (eis->parsed()) {
            if (eis_bound < 4) {
                std::cerr << "eisenstein: --bound must be at least 4\n";
                return exit_usage;
            }
            jacform::JacobiExpansion phi = jacform::eisenstein_km(eis_k, eis_m, eis_bound);
            if (eis_format == "csv") {
                jacform::write_text_file(eis_out, jacform::expansion_to_csv(phi));
            } else {
                jacform::write_expansion(eis_out, phi);
            }
            return exit_ok;
        }

        if (hec->parsed()) {
            jacform::JacobiExpansion phi = jacform::read_expansion(hec_in);
            if (hec_verify) {
                jacform::HeckeEigenReport rep = jacform::detect_eigenvalue(phi, hec_p);
                if (!rep.is_eigen()) {
                    std::cout << "NOT_EIGEN for p=" << hec_p << " within |D|<="
                              << rep.certified_bound << "\n";
                    return exit_negative;
                }
                std::cout << "eigenvalue " << format_eigenvalue(*rep.eigenvalue)
                          << " certified |D|<=" << rep.certified_bound << "\n";
                if (!hec_out.empty())
                    jacform::write_expansion(hec_out, jacform::hecke_tp(phi, hec_p));
                return exit_ok;
            }
            if (hec_out.empty()) {
                std::cerr << "hecke: give --out or --verify-eigen\n";
                return exit_usage;
            }
            jacform::write_expansion(hec_out, jacform::hecke_tp(phi, hec_p));
            return exit_ok;
        }

        if (scn->parsed()) {
            jacform::JacobiExpansion phi = jacform::read_expansion(scn_in);
            jacform::LocalConditions conds = parse_conditions(scn_conds);
            jacform::ScanOptions opt;
            opt.bound = scn_bound;
            opt.threads = scn_threads;
            opt.checkpoint_path = scn_checkpoint;
            opt.probe_primes = scn_probes;
            jacform::ScanReport rep = jacform::scan(phi, scn_ell, conds, opt);
            if (scn_format == "csv") {
                jacform::write_text_file(scn_out, jacform::scan_report_to_csv(rep));
            } else {
                jacform::write_text_file(scn_out,
                                         jacform::scan_report_to_json(rep).dump(1) + "\n");
            }
            std::cout << "hits " << rep.hits.size() << " of " << rep.examined << " examined\n";
            return rep.status == jacform::ScanStatus::Ok ? exit_ok : exit_negative;
        }

        if (red->parsed()) {
            jacform::JacobiExpansion phi = jacform::read_expansion(red_in);
            jacform::FundamentalReduction r = jacform::reduce_to_fundamental(phi, red_n, red_r);
            std::cout << "(" << r.n0 << ", " << r.r0 << ", f=" << r.f << ")\n";
            return exit_ok;
        }

        if (tht->parsed()) {
            jacform::JacobiExpansion phi = jacform::read_expansion(tht_in);
            jacform::ThetaComponents tc = jacform::decompose(phi);
            jacform::write_text_file(tht_out, jacform::theta_to_json(tc).dump(1) + "\n");
            return exit_ok;
        }
    } catch (const std::exception& e) {
        std::cerr << argv[0] << ": " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}
