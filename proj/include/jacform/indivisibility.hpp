#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "jacform/expansion.hpp"
#include "jacform/numtheory.hpp"
#include "jacform/operators.hpp"
#include "jacform/serialize.hpp"

namespace jacform {

// Sign conditions (D / p_j) = eps_j at finitely many odd primes.
struct LocalConditions {
    std::vector<std::pair<std::uint64_t, int>> signs;  // (odd prime, +-1)

    void validate(std::uint64_t m, std::uint64_t N) const {
        for (std::size_t i = 0; i < signs.size(); ++i) {
            const auto& [p, eps] = signs[i];
            if (!is_prime(p) || p == 2)
                throw ArgumentError("LocalConditions: " + std::to_string(p) +
                                    " is not an odd prime");
            if ((m * N) % p == 0)
                throw ArgumentError("LocalConditions: prime " + std::to_string(p) +
                                    " must be coprime to mN");
            if (eps != 1 && eps != -1) throw ArgumentError("LocalConditions: sign must be +-1");
            for (std::size_t j = i + 1; j < signs.size(); ++j) {
                if (signs[j].first == p)
                    throw ArgumentError("LocalConditions: duplicate prime " + std::to_string(p));
            }
        }
    }

    bool admits(long long D) const {
        for (const auto& [p, eps] : signs) {
            if (kronecker(D, static_cast<long long>(p)) != eps) return false;
        }
        return true;
    }
};

// A(p, lambda_p): primes dividing lambda_p -+ chi(p)(p^(k-1) + p^(k-2))
// together with the primes dividing p(p-1).
inline std::set<std::uint64_t> exceptional_set(std::uint64_t p, const Rational& lambda_p,
                                               unsigned k, int chi_p) {
    if (!is_prime(p)) throw ArgumentError("exceptional_set: p must be prime");
    if (k < 2) throw ArgumentError("exceptional_set: weight must be at least 2");
    if (!lambda_p.is_integer())
        throw ArgumentError("exceptional_set: eigenvalue must be an integer");
    if (chi_p != 1 && chi_p != -1) throw ArgumentError("exceptional_set: chi(p) must be +-1");

    mpz_class edge;
    mpz_ui_pow_ui(edge.get_mpz_t(), p, k - 2);
    edge *= mpz_class(static_cast<unsigned long>(p) + 1);  // p^(k-1) + p^(k-2)

    std::set<std::uint64_t> out;
    auto absorb = [&out](const mpz_class& value) {
        mpz_class a = abs(value);
        if (a == 0)
            throw InfiniteSetError(
                "exceptional_set: eigenvalue is degenerate, the set is infinite");
        if (a == 1) return;
        if (!a.fits_ulong_p())
            throw ArgumentError("exceptional_set: value exceeds the factorization range");
        for (const auto& [q, e] : factorize(a.get_ui())) {
            (void)e;
            out.insert(q);
        }
    };
    absorb(lambda_p.numerator() - chi_p * edge);
    absorb(lambda_p.numerator() + chi_p * edge);
    absorb(mpz_class(static_cast<unsigned long>(p)) * mpz_class(static_cast<unsigned long>(p) - 1));
    return out;
}

// Intersection of A(p, lambda_p) over the usable probe primes: p must be
// coprime to 2mN (and the character modulus), small enough for the bound,
// and phi must certify as a T_p eigenform with an integral eigenvalue.
// Returns nullopt when no probe is usable; a probe with an infinite A-set
// constrains nothing and is skipped.
inline std::optional<std::set<std::uint64_t>> exceptional_intersection(
    const JacobiExpansion& phi, const std::vector<std::uint64_t>& probes) {
    const FormSignature& s = phi.signature();
    std::optional<std::set<std::uint64_t>> acc;
    if (phi.is_zero()) return acc;
    for (std::uint64_t p : probes) {
        if (!is_prime(p) || (2 * s.index() * s.lattice()) % p == 0) continue;
        if (p * p > phi.bound()) continue;
        long long chi_p = s.chi(static_cast<long long>(p));
        if (chi_p != 1 && chi_p != -1) continue;
        HeckeEigenReport rep = detect_eigenvalue(phi, p);
        if (!rep.is_eigen() || !rep.eigenvalue->is_integer()) continue;
        std::set<std::uint64_t> a;
        try {
            a = exceptional_set(p, *rep.eigenvalue, s.weight(), static_cast<int>(chi_p));
        } catch (const InfiniteSetError&) {
            continue;
        }
        if (!acc) {
            acc = std::move(a);
        } else {
            std::set<std::uint64_t> meet;
            for (std::uint64_t q : *acc) {
                if (a.count(q) != 0) meet.insert(q);
            }
            acc = std::move(meet);
        }
    }
    return acc;
}

// Fundamental D < 0 with |D| in [lo, hi], gcd(D, mN) = 1, all sign
// conditions, paired with every residue rho mod 2m solving rho^2 = D mod 4m;
// |D| ascending, rho ascending within each D.
template <typename Emit>
inline void enumerate_fundamentals_range(std::uint64_t lo, std::uint64_t hi, std::uint64_t m,
                                         std::uint64_t N, const LocalConditions& conds,
                                         Emit&& emit) {
    for (std::uint64_t abs_d = std::max<std::uint64_t>(lo, 1); abs_d <= hi; ++abs_d) {
        long long D = -static_cast<long long>(abs_d);
        if (std::gcd(abs_d, m * N) != 1) continue;
        if (!is_fundamental_discriminant(D)) continue;
        if (!conds.admits(D)) continue;
        for (std::uint64_t rho = 0; rho < 2 * m; ++rho) {
            __int128 delta = static_cast<__int128>(rho) * rho - D;
            if (delta % static_cast<__int128>(4 * m) != 0) continue;
            emit(D, rho);
        }
    }
}

inline std::vector<std::pair<long long, std::uint64_t>> enumerate_fundamentals(
    std::uint64_t bound, std::uint64_t m, std::uint64_t N, const LocalConditions& conds = {}) {
    if (m == 0 || N == 0) throw ArgumentError("enumerate_fundamentals: m, N must be positive");
    conds.validate(m, N);
    std::vector<std::pair<long long, std::uint64_t>> out;
    enumerate_fundamentals_range(1, bound, m, N, conds,
                                 [&out](long long D, std::uint64_t rho) { out.emplace_back(D, rho); });
    return out;
}

enum class ScanStatus { Ok, Inconclusive };

struct ScanHit {
    long long D;
    std::uint64_t rho;
    Rational coeff;
};

struct ScanReport {
    std::uint64_t ell = 0;
    std::uint64_t bound = 0;
    LocalConditions conditions;
    bool exceptional = false;                      // ell inside the A-set intersection
    std::vector<std::uint64_t> exceptional_set;    // the computed intersection, sorted
    std::optional<std::pair<long long, std::uint64_t>> seed;  // first nu_ell = 0 orbit
    ScanStatus status = ScanStatus::Inconclusive;
    std::uint64_t examined = 0;
    std::vector<ScanHit> hits;
};

struct ScanOptions {
    std::uint64_t bound = 0;      // 0: use the expansion's bound
    unsigned threads = 0;         // 0: hardware concurrency
    std::string checkpoint_path;  // empty: no checkpointing
    std::vector<std::uint64_t> probe_primes = {5, 7, 11, 13};
};

inline nlohmann::ordered_json scan_report_to_json(const ScanReport& rep) {
    nlohmann::ordered_json j;
    j["ell"] = rep.ell;
    j["bound"] = rep.bound;
    nlohmann::ordered_json conds = nlohmann::ordered_json::array();
    for (const auto& [p, eps] : rep.conditions.signs)
        conds.push_back(nlohmann::ordered_json::array({p, eps}));
    j["conditions"] = std::move(conds);
    j["exceptional"] = rep.exceptional;
    j["exceptional_set"] = rep.exceptional_set;
    j["status"] = rep.status == ScanStatus::Ok ? "ok" : "inconclusive";
    if (rep.seed) {
        j["seed"] = {{"D", rep.seed->first}, {"rho", rep.seed->second}};
    } else {
        j["seed"] = nullptr;
    }
    j["examined"] = rep.examined;
    nlohmann::ordered_json hits = nlohmann::ordered_json::array();
    for (const auto& h : rep.hits) {
        hits.push_back({{"D", h.D}, {"rho", h.rho}, {"coeff", h.coeff.str()}});
    }
    j["hits"] = std::move(hits);
    return j;
}

inline std::string scan_report_to_csv(const ScanReport& rep) {
    std::string out = "D,rho,numerator,denominator\n";
    for (const auto& h : rep.hits) {
        out += std::to_string(h.D) + "," + std::to_string(h.rho) + "," +
               h.coeff.numerator().get_str() + "," + h.coeff.denominator().get_str() + "\n";
    }
    return out;
}

namespace detail {

constexpr std::uint64_t scan_chunk_width = 2048;
constexpr std::uint64_t scan_checkpoint_stride = 10000;

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct ScanState {
    std::size_t frontier = 0;  // chunks merged so far
    std::uint64_t examined = 0;
    std::vector<ScanHit> hits;
};

inline nlohmann::ordered_json scan_fingerprint(const JacobiExpansion& phi, std::uint64_t ell,
                                               std::uint64_t bound,
                                               const LocalConditions& conds) {
    nlohmann::ordered_json fp;
    fp["ell"] = ell;
    fp["bound"] = bound;
    fp["k"] = phi.signature().weight();
    fp["m"] = phi.signature().index();
    fp["N"] = phi.signature().lattice();
    fp["chunk_width"] = scan_chunk_width;
    nlohmann::ordered_json conds_json = nlohmann::ordered_json::array();
    for (const auto& [p, eps] : conds.signs)
        conds_json.push_back(nlohmann::ordered_json::array({p, eps}));
    fp["conditions"] = std::move(conds_json);
    char hex[32];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a(expansion_to_json(phi).dump())));
    fp["form_hash"] = std::string(hex);
    return fp;
}

inline void write_scan_checkpoint(const std::string& path, const nlohmann::ordered_json& fp,
                                  const ScanState& st) {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["fingerprint"] = fp;
    j["frontier"] = st.frontier;
    j["examined"] = st.examined;
    nlohmann::ordered_json hits = nlohmann::ordered_json::array();
    for (const auto& h : st.hits)
        hits.push_back({{"D", h.D}, {"rho", h.rho}, {"coeff", h.coeff.str()}});
    j["hits"] = std::move(hits);
    write_text_file(path, j.dump(1) + "\n");
}

// Loads a resumable state if the file exists and matches the fingerprint;
// a missing or mismatched file yields a fresh state.
inline ScanState load_scan_checkpoint(const std::string& path, const nlohmann::ordered_json& fp) {
    ScanState st;
    if (path.empty() || !std::filesystem::exists(path)) return st;
    try {
        nlohmann::ordered_json j = nlohmann::ordered_json::parse(read_text_file(path));
        if (j.at("version") != 1 || j.at("fingerprint") != fp) return st;
        st.frontier = j.at("frontier").get<std::size_t>();
        st.examined = j.at("examined").get<std::uint64_t>();
        for (const auto& h : j.at("hits")) {
            st.hits.push_back(ScanHit{h.at("D").get<long long>(),
                                      h.at("rho").get<std::uint64_t>(),
                                      Rational::parse(h.at("coeff").get<std::string>())});
        }
        return st;
    } catch (const nlohmann::json::exception&) {
        return ScanState{};
    } catch (const std::invalid_argument&) {
        return ScanState{};
    }
}

}  // namespace detail

// Scans fundamental discriminants |D| <= bound for nu_ell(c(n, r)) = 0,
// in |D|-chunks processed by a worker pool and merged deterministically.
inline ScanReport scan(const JacobiExpansion& phi, std::uint64_t ell,
                       const LocalConditions& conds = {}, const ScanOptions& opt = {}) {
    const FormSignature& s = phi.signature();
    const std::uint64_t m = s.index();
    const std::uint64_t N = s.lattice();
    if (!is_prime(ell)) throw ArgumentError("scan: ell must be prime");
    if (std::gcd(ell, 2 * m * N) != 1)
        throw ArgumentError("scan: ell must be coprime to 2mN");
    if (!phi.sealed()) throw ArgumentError("scan: expansion must be sealed");
    conds.validate(m, N);
    const std::uint64_t bound = opt.bound == 0 ? phi.bound() : opt.bound;
    if (bound > phi.bound())
        throw TruncationError("scan: requested bound exceeds the expansion bound");

    ScanReport rep;
    rep.ell = ell;
    rep.bound = bound;
    rep.conditions = conds;

    std::vector<std::uint64_t> probes = opt.probe_primes;
    for (const auto& [p, eps] : conds.signs) probes.push_back(p);
    if (auto meet = exceptional_intersection(phi, probes)) {
        rep.exceptional_set.assign(meet->begin(), meet->end());
        rep.exceptional = meet->count(ell) != 0;
    }

    for (const auto& [key, v] : phi.coefficients()) {
        if (key.D >= 0 || std::gcd(static_cast<std::uint64_t>(-key.D), m * N) != 1) continue;
        if (nu_ell(v, ell) == Valuation(0)) {
            rep.seed = std::make_pair(key.D, key.rho);
            break;
        }
    }

    const std::size_t n_chunks =
        static_cast<std::size_t>((bound + detail::scan_chunk_width - 1) / detail::scan_chunk_width);
    nlohmann::ordered_json fp;
    detail::ScanState state;
    const bool checkpointing = !opt.checkpoint_path.empty();
    if (checkpointing) {
        fp = detail::scan_fingerprint(phi, ell, bound, conds);
        state = detail::load_scan_checkpoint(opt.checkpoint_path, fp);
        if (state.frontier > n_chunks) state = detail::ScanState{};
    }

    struct ChunkOut {
        std::vector<ScanHit> hits;
        std::uint64_t examined = 0;
        bool done = false;
    };
    std::vector<ChunkOut> outs(n_chunks);
    std::atomic<std::size_t> next{state.frontier};
    std::mutex merge_mx;
    std::uint64_t since_checkpoint = 0;

    auto work = [&]() {
        for (;;) {
            std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            std::uint64_t lo = static_cast<std::uint64_t>(c) * detail::scan_chunk_width + 1;
            std::uint64_t hi = std::min(bound, lo + detail::scan_chunk_width - 1);
            ChunkOut out;
            enumerate_fundamentals_range(lo, hi, m, N, conds,
                                         [&](long long D, std::uint64_t rho) {
                                             ++out.examined;
                                             __int128 delta =
                                                 static_cast<__int128>(rho) * rho - D;
                                             long long n = static_cast<long long>(
                                                 delta / static_cast<__int128>(4 * m));
                                             Rational v =
                                                 phi.coeff(n, static_cast<long long>(rho));
                                             if (!v.is_zero() && nu_ell(v, ell) == Valuation(0))
                                                 out.hits.push_back(ScanHit{D, rho, v});
                                         });
            std::lock_guard<std::mutex> lk(merge_mx);
            outs[c] = std::move(out);
            outs[c].done = true;
            while (state.frontier < n_chunks && outs[state.frontier].done) {
                ChunkOut& merged = outs[state.frontier];
                state.examined += merged.examined;
                since_checkpoint += merged.examined;
                state.hits.insert(state.hits.end(), merged.hits.begin(), merged.hits.end());
                merged.hits.clear();
                ++state.frontier;
                if (checkpointing && since_checkpoint >= detail::scan_checkpoint_stride) {
                    detail::write_scan_checkpoint(opt.checkpoint_path, fp, state);
                    since_checkpoint = 0;
                }
            }
        }
    };

    unsigned threads = opt.threads != 0 ? opt.threads
                                        : std::max(1u, std::thread::hardware_concurrency());
    if (threads <= 1 || n_chunks <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
        work();
        for (auto& th : pool) th.join();
    }

    rep.examined = state.examined;
    rep.hits = std::move(state.hits);
    rep.status = rep.hits.empty() ? ScanStatus::Inconclusive : ScanStatus::Ok;
    if (checkpointing) std::filesystem::remove(opt.checkpoint_path);
    return rep;
}

struct FundamentalReduction {
    long long n0;
    long long r0;
    long long f;
};

// Descends (n, r) with D = f^2 D_0 to the fundamental level: for odd p | f
// shift r by 2mN lambda until p | r (2mN is invertible mod p), divide the
// orbit data by (p^2, p); for p = 2 search the four shifts directly.
inline FundamentalReduction reduce_to_fundamental(const JacobiExpansion& phi, long long n,
                                                  long long r) {
    const FormSignature& s = phi.signature();
    const long long m = static_cast<long long>(s.index());
    const long long N = static_cast<long long>(s.lattice());
    __int128 Dw = JacobiExpansion::discriminant_wide(n, r, s.index());
    if (Dw >= 0) throw ArgumentError("reduce_to_fundamental: discriminant must be negative");
    if (Dw < -static_cast<__int128>(1) << 62)
        throw ArgumentError("reduce_to_fundamental: discriminant out of range");
    long long D = static_cast<long long>(Dw);
    if (std::gcd(-D, m * N) != 1)
        throw ArgumentError("reduce_to_fundamental: D must be coprime to mN");

    auto [d0, f] = fundamental_decompose(D);
    long long cn = n;
    long long cr = r;
    for (const auto& [p, mult] : factorize(static_cast<std::uint64_t>(f))) {
        long long pl = static_cast<long long>(p);
        for (unsigned step = 0; step < mult; ++step) {
            long long span = pl == 2 ? 4 : pl;
            bool descended = false;
            for (long long lam = 0; lam < span && !descended; ++lam) {
                long long r2 = cr + 2 * m * N * lam;
                long long n2 = cn + cr * N * lam + m * N * N * lam * lam;
                if (mod_floor(r2, pl) != 0 || mod_floor(n2, pl * pl) != 0) continue;
                cr = r2 / pl;
                cn = n2 / (pl * pl);
                descended = true;
            }
            if (!descended)
                throw ConsistencyError("reduce_to_fundamental: no shift divides out " +
                                       std::to_string(p));
        }
    }

    if (static_cast<__int128>(cr) * cr - 4 * static_cast<__int128>(m) * cn != d0)
        throw ConsistencyError("reduce_to_fundamental: descent left a wrong discriminant");
    long long r0 = mod_floor(cr, 2 * m * N);
    long long n0 = static_cast<long long>(
        (static_cast<__int128>(r0) * r0 - d0) / static_cast<__int128>(4 * m));

    if (static_cast<std::uint64_t>(-D) <= phi.bound()) {
        if (phi.coeff(n, r) != phi.coeff(f * f * n0, f * r0))
            throw ConsistencyError("reduce_to_fundamental: coefficient equality failed");
    }
    return FundamentalReduction{n0, r0, f};
}

struct RelationCheck {
    long long f;
    Valuation lifted;
    bool pass;
};

struct RelationReport {
    std::uint64_t ell = 0;
    long long n = 0;
    long long r = 0;
    Valuation base = Valuation::infinity();
    std::vector<RelationCheck> checks;
    bool all_pass = true;
};

// nu_ell(c(f^2 n, f r)) >= nu_ell(c(n, r)) for fundamental D and
// gcd(f, mN) = 1.
inline RelationReport hecke_relation_check(const JacobiExpansion& phi, std::uint64_t ell,
                                           long long n, long long r,
                                           const std::vector<long long>& f_list) {
    const FormSignature& s = phi.signature();
    __int128 Dw = JacobiExpansion::discriminant_wide(n, r, s.index());
    if (Dw >= 0 || Dw < -static_cast<__int128>(1) << 62 ||
        !is_fundamental_discriminant(static_cast<long long>(Dw)))
        throw ArgumentError("hecke_relation_check: discriminant must be fundamental");
    RelationReport rep;
    rep.ell = ell;
    rep.n = n;
    rep.r = r;
    rep.base = nu_ell(phi.coeff(n, r), ell);
    const long long mn = static_cast<long long>(s.index() * s.lattice());
    for (long long f : f_list) {
        if (f == 0 || std::gcd(f < 0 ? -f : f, mn) != 1)
            throw ArgumentError("hecke_relation_check: f must be nonzero and coprime to mN");
        Valuation lifted = nu_ell(phi.coeff(f * f * n, f * r), ell);
        bool pass = rep.base <= lifted;
        rep.checks.push_back(RelationCheck{f, lifted, pass});
        rep.all_pass = rep.all_pass && pass;
    }
    return rep;
}

}  // namespace jacform
