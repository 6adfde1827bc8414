#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "jacform/eisenstein.hpp"
#include "jacform/operators.hpp"
#include "jacform/serialize.hpp"

using jacform::JacobiExpansion;
using jacform::Rational;

namespace {

const std::filesystem::path tmp_dir = "cli_tmp";

std::string tmp(const std::string& name) { return (tmp_dir / name).string(); }

int run_cli(const std::string& args, const std::string& capture = "") {
    std::string cmd = std::string(JACFORM_CLI_PATH) + " " + args;
    if (capture.empty()) {
        cmd += " > /dev/null 2>&1";
    } else {
        cmd += " > " + capture + " 2>&1";
    }
    int raw = std::system(cmd.c_str());
    REQUIRE(raw != -1);
    REQUIRE(WIFEXITED(raw));
    return WEXITSTATUS(raw);
}

nlohmann::json read_json(const std::string& path) {
    return nlohmann::json::parse(jacform::read_text_file(path));
}

}  // namespace

TEST_CASE("cli eisenstein command") {
    std::filesystem::create_directories(tmp_dir);

    SECTION("output matches the library writer byte for byte") {
        REQUIRE(run_cli("eisenstein --k 4 --m 1 --bound 100 --out " + tmp("e41_cli.json")) == 0);
        jacform::write_expansion(tmp("e41_lib.json"), jacform::eisenstein_k1(4, 100));
        REQUIRE(jacform::read_text_file(tmp("e41_cli.json")) ==
                jacform::read_text_file(tmp("e41_lib.json")));
        nlohmann::json j = read_json(tmp("e41_cli.json"));
        bool found = false;
        for (const auto& row : j.at("coeffs"))
            if (row.at(0).get<long long>() == -3 && row.at(1).get<long long>() == 1) {
                REQUIRE(row.at(2).get<std::string>() == "56/1");
                found = true;
            }
        REQUIRE(found);
    }

    SECTION("reruns are byte identical") {
        REQUIRE(run_cli("eisenstein --k 6 --bound 60 --out " + tmp("rerun_a.json")) == 0);
        REQUIRE(run_cli("eisenstein --k 6 --bound 60 --out " + tmp("rerun_b.json")) == 0);
        REQUIRE(jacform::read_text_file(tmp("rerun_a.json")) ==
                jacform::read_text_file(tmp("rerun_b.json")));
    }

    SECTION("csv format") {
        REQUIRE(run_cli("eisenstein --k 4 --bound 20 --format csv --out " + tmp("e41.csv")) == 0);
        std::string csv = jacform::read_text_file(tmp("e41.csv"));
        REQUIRE(csv.rfind("D,rho,numerator,denominator\n", 0) == 0);
        REQUIRE(csv.find("-3,1,56,1\n") != std::string::npos);
    }

    SECTION("usage errors exit with 2") {
        REQUIRE(run_cli("eisenstein --k 3 --bound 100 --out " + tmp("bad.json")) == 2);
        REQUIRE(run_cli("eisenstein --k 4 --bound 0 --out " + tmp("bad.json")) == 2);
        REQUIRE(run_cli("eisenstein --k 4 --out " + tmp("bad.json")) == 2);
        REQUIRE(run_cli("eisenstein --k 4 --bound 20 --wat --out " + tmp("bad.json")) == 2);
        REQUIRE(run_cli("") == 2);
    }
}

TEST_CASE("cli hecke command") {
    std::filesystem::create_directories(tmp_dir);
    jacform::write_expansion(tmp("h_in.json"), jacform::eisenstein_k1(4, 100));

    SECTION("eigenvalue certification") {
        int rc = run_cli("hecke --in " + tmp("h_in.json") + " --p 5 --verify-eigen",
                         tmp("h_verify.txt"));
        REQUIRE(rc == 0);
        REQUIRE(jacform::read_text_file(tmp("h_verify.txt")) ==
                "eigenvalue 3126 certified |D|<=4\n");
    }

    SECTION("non eigenform exits with 1") {
        JacobiExpansion e41 = jacform::eisenstein_k1(4, 100);
        JacobiExpansion delta(e41.signature(), e41.bound());
        delta.set_coeff_key(-4, 0, Rational(1));
        delta.seal();
        jacform::write_expansion(tmp("h_perturbed.json"), jacform::add(e41, delta));
        int rc = run_cli("hecke --in " + tmp("h_perturbed.json") + " --p 5 --verify-eigen",
                         tmp("h_noteigen.txt"));
        REQUIRE(rc == 1);
        REQUIRE(jacform::read_text_file(tmp("h_noteigen.txt")).rfind("NOT_EIGEN", 0) == 0);
    }

    SECTION("transform output matches the library") {
        REQUIRE(run_cli("hecke --in " + tmp("h_in.json") + " --p 5 --out " +
                        tmp("h_cli.json")) == 0);
        jacform::write_expansion(tmp("h_lib.json"),
                                 jacform::hecke_tp(jacform::eisenstein_k1(4, 100), 5));
        REQUIRE(jacform::read_text_file(tmp("h_cli.json")) ==
                jacform::read_text_file(tmp("h_lib.json")));
    }

    SECTION("usage errors exit with 2") {
        REQUIRE(run_cli("hecke --p 5") == 2);
        REQUIRE(run_cli("hecke --in " + tmp("h_in.json") + " --p 5") == 2);
        REQUIRE(run_cli("hecke --in " + tmp("missing.json") + " --p 5 --verify-eigen") == 2);
        REQUIRE(run_cli("hecke --in " + tmp("h_in.json") + " --p 4 --verify-eigen") == 2);
    }
}

TEST_CASE("cli scan command") {
    std::filesystem::create_directories(tmp_dir);
    REQUIRE(run_cli("eisenstein --k 4 --bound 500 --out " + tmp("s_in.json")) == 0);

    SECTION("full scan with frozen counts") {
        int rc = run_cli("scan --in " + tmp("s_in.json") + " --ell 11 --out " +
                         tmp("s_out.json"));
        REQUIRE(rc == 0);
        nlohmann::json j = read_json(tmp("s_out.json"));
        REQUIRE(j.at("ell").get<std::uint64_t>() == 11);
        REQUIRE(j.at("examined").get<std::uint64_t>() == 153);
        REQUIRE(j.at("hits").size() == 132);
        REQUIRE(j.at("status").get<std::string>() == "ok");
    }

    SECTION("reruns are byte identical regardless of threads") {
        REQUIRE(run_cli("scan --in " + tmp("s_in.json") + " --ell 13 --threads 1 --out " +
                        tmp("s_t1.json")) == 0);
        REQUIRE(run_cli("scan --in " + tmp("s_in.json") + " --ell 13 --threads 3 --out " +
                        tmp("s_t3.json")) == 0);
        REQUIRE(jacform::read_text_file(tmp("s_t1.json")) ==
                jacform::read_text_file(tmp("s_t3.json")));
    }

    SECTION("local conditions restrict the scan") {
        int rc = run_cli("scan --in " + tmp("s_in.json") + " --ell 11 --bound 20 " +
                         "--cond 5:+1 --out " + tmp("s_cond.json"));
        REQUIRE(rc == 0);
        nlohmann::json j = read_json(tmp("s_cond.json"));
        REQUIRE(j.at("examined").get<std::uint64_t>() == 3);
        for (const auto& hit : j.at("hits")) {
            long long d = hit.at("D").get<long long>();
            REQUIRE((d == -4 || d == -11 || d == -19));
        }
    }

    SECTION("csv format") {
        REQUIRE(run_cli("scan --in " + tmp("s_in.json") + " --ell 11 --bound 20 " +
                        "--format csv --out " + tmp("s_out.csv")) == 0);
        std::string csv = jacform::read_text_file(tmp("s_out.csv"));
        REQUIRE(csv.rfind("D,rho,numerator,denominator\n", 0) == 0);
        REQUIRE(csv.find("-3,1,56,1\n") != std::string::npos);
    }

    SECTION("empty result exits with 1 but still writes the report") {
        JacobiExpansion zero(jacform::eisenstein_k1(4, 100).signature(), 100);
        zero.seal();
        jacform::write_expansion(tmp("s_zero.json"), zero);
        int rc = run_cli("scan --in " + tmp("s_zero.json") + " --ell 11 --out " +
                         tmp("s_zero_out.json"));
        REQUIRE(rc == 1);
        nlohmann::json j = read_json(tmp("s_zero_out.json"));
        REQUIRE(j.at("hits").empty());
        REQUIRE(j.at("status").get<std::string>() == "inconclusive");
    }

    SECTION("usage errors exit with 2") {
        REQUIRE(run_cli("scan --in " + tmp("s_in.json") + " --ell 2 --out " +
                        tmp("s_bad.json")) == 2);
        REQUIRE(run_cli("scan --in " + tmp("s_in.json") + " --ell 11 --cond 4:+1 --out " +
                        tmp("s_bad.json")) == 2);
        REQUIRE(run_cli("scan --in " + tmp("s_in.json") + " --ell 11 --cond 5:x --out " +
                        tmp("s_bad.json")) == 2);
        REQUIRE(run_cli("scan --in " + tmp("s_in.json") + " --ell 11 --bound 9999 --out " +
                        tmp("s_bad.json")) == 2);
    }
}

TEST_CASE("cli reduce command") {
    std::filesystem::create_directories(tmp_dir);
    jacform::write_expansion(tmp("r_in.json"), jacform::eisenstein_k1(4, 100));

    SECTION("prints the reduced triple") {
        int rc = run_cli("reduce --in " + tmp("r_in.json") + " --n 9 --r 3",
                         tmp("r_out.txt"));
        REQUIRE(rc == 0);
        REQUIRE(jacform::read_text_file(tmp("r_out.txt")) == "(1, 1, f=3)\n");
    }

    SECTION("rejects non negative discriminants") {
        REQUIRE(run_cli("reduce --in " + tmp("r_in.json") + " --n 0 --r 1") == 2);
    }
}

TEST_CASE("cli theta command") {
    std::filesystem::create_directories(tmp_dir);
    jacform::write_expansion(tmp("t_in.json"), jacform::eisenstein_k1(4, 50));

    SECTION("decomposition output") {
        REQUIRE(run_cli("theta --in " + tmp("t_in.json") + " --out " + tmp("t_out.json")) == 0);
        nlohmann::json j = read_json(tmp("t_out.json"));
        REQUIRE(j.at("m").get<std::uint64_t>() == 1);
        bool found = false;
        for (const auto& row : j.at("components").at("1"))
            if (row.at(0).get<long long>() == -3) {
                REQUIRE(row.at(1).get<std::string>() == "56/1");
                found = true;
            }
        REQUIRE(found);
    }

    SECTION("scaled lattice inputs are rejected") {
        JacobiExpansion e41 = jacform::eisenstein_k1(4, 50);
        jacform::write_expansion(tmp("t_promoted.json"), jacform::promote(e41, 3));
        REQUIRE(run_cli("theta --in " + tmp("t_promoted.json") + " --out " +
                        tmp("t_bad.json")) == 2);
    }
}

TEST_CASE("cli config file") {
    std::filesystem::create_directories(tmp_dir);
    jacform::write_text_file(tmp("cfg.toml"),
                             "[eisenstein]\nk=4\nbound=60\nout=\"" + tmp("cfg_out.json") +
                                 "\"\n");

    SECTION("config values fill in options") {
        REQUIRE(run_cli("--config " + tmp("cfg.toml") + " eisenstein") == 0);
        nlohmann::json j = read_json(tmp("cfg_out.json"));
        REQUIRE(j.at("bound").get<std::uint64_t>() == 60);
    }

    SECTION("command line flags override the config") {
        REQUIRE(run_cli("--config " + tmp("cfg.toml") + " eisenstein --bound 30") == 0);
        nlohmann::json j = read_json(tmp("cfg_out.json"));
        REQUIRE(j.at("bound").get<std::uint64_t>() == 30);
    }
}
