#include "geomodel/embedding_limits.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "geomodel/lp.hpp"

namespace geomodel {

namespace {

void require_dim(std::size_t expected, std::size_t got) {
    if (expected != got) throw DimensionMismatch(expected, got);
}

void require_square(const RationalMatrix& m, std::size_t n) {
    require_dim(n, m.size());
    for (const auto& row : m) require_dim(n, row.size());
}

RationalVector mat_vec(const RationalMatrix& m, const RationalVector& v) {
    RationalVector out(m.size(), Rational(0));
    for (std::size_t i = 0; i < m.size(); ++i) {
        require_dim(v.size(), m[i].size());
        for (std::size_t j = 0; j < v.size(); ++j)
            if (m[i][j] != 0 && v[j] != 0) out[i] += m[i][j] * v[j];
    }
    return out;
}

RationalMatrix transpose(const RationalMatrix& m) {
    if (m.empty()) return {};
    RationalMatrix t(m[0].size(), RationalVector(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
    return t;
}

bool is_zero(const RationalMatrix& m) {
    return std::all_of(m.begin(), m.end(),
                       [](const RationalVector& r) { return std::all_of(r.begin(), r.end(), [](const Rational& x) { return x == 0; }); });
}

bool is_zero(const RationalVector& v) {
    return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; });
}

RationalVector unit(std::size_t n, std::size_t i, Rational scale = 1) {
    RationalVector v(n, Rational(0));
    v[i] = std::move(scale);
    return v;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// --- bilinear counterexamples ---------------------------------------------

struct Thresholds {
    const Rational& body;
    const Rational& head;
};

// Vector v with a.v >= body and b.v < head, if one exists.
std::optional<RationalVector> solve_linear_pair(const RationalVector& a, const RationalVector& b, const Thresholds& th) {
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const Rational det = a[i] * b[j] - a[j] * b[i];
            if (det == 0) continue;
            // a_i x + a_j y = body, b_i x + b_j y = head - 1.
            const Rational u = th.body, w = th.head - 1;
            RationalVector v(n, Rational(0));
            v[i] = (u * b[j] - a[j] * w) / det;
            v[j] = (a[i] * w - u * b[i]) / det;
            return v;
        }
    auto nz = std::find_if(b.begin(), b.end(), [](const Rational& x) { return x != 0; });
    if (nz == b.end()) {
        if (th.head <= 0) return std::nullopt;
        auto anz = std::find_if(a.begin(), a.end(), [](const Rational& x) { return x != 0; });
        if (anz == a.end()) return th.body <= 0 ? std::optional(RationalVector(n, Rational(0))) : std::nullopt;
        const auto j = static_cast<std::size_t>(anz - a.begin());
        return unit(n, j, th.body / a[j]);
    }
    const auto j = static_cast<std::size_t>(nz - b.begin());
    const Rational c = a[j] / b[j];
    Rational x;
    if (c == 0) {
        if (th.body > 0) return std::nullopt;
        x = th.head - 1;
    } else if (c < 0) {
        x = std::min<Rational>(th.head - 1, th.body / c);
    } else {
        x = th.body / c;
        if (x >= th.head) return std::nullopt;
    }
    return unit(n, j, x / b[j]);
}

struct Witness {
    RationalVector e, f;
    std::string construction;
};

std::optional<Witness> entry_constructions(const RationalMatrix& mr, const RationalMatrix& ms, const Thresholds& th) {
    const std::size_t n = mr.size();
    const Rational low = th.head - 1;
    // A row (column) where M_s vanishes keeps the head at 0.
    if (th.head > 0)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t m = 0; m < n; ++m) {
                if (mr[k][m] != 0 && std::all_of(ms[k].begin(), ms[k].end(), [](const Rational& x) { return x == 0; }))
                    return Witness{unit(n, k), unit(n, m, th.body / mr[k][m]), "row-support"};
                if (mr[m][k] != 0 &&
                    std::all_of(ms.begin(), ms.end(), [&](const RationalVector& row) { return row[k] == 0; }))
                    return Witness{unit(n, m, th.body / mr[m][k]), unit(n, k), "column-support"};
            }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
            if (ms[k][l] == 0) continue;
            for (std::size_t m = 0; m < n; ++m) {
                // Row k: M_s vanishes at (k, m) where M_r does not.
                if (ms[k][m] == 0 && mr[k][m] != 0) {
                    RationalVector f(n, Rational(0));
                    f[l] = low / ms[k][l];
                    f[m] = (th.body - mr[k][l] * low / ms[k][l]) / mr[k][m];
                    return Witness{unit(n, k), f, "row-support"};
                }
                // Column l: same with the roles of e and f exchanged.
                if (ms[m][l] == 0 && mr[m][l] != 0) {
                    RationalVector e(n, Rational(0));
                    e[k] = low / ms[k][l];
                    e[m] = (th.body - mr[k][l] * low / ms[k][l]) / mr[m][l];
                    return Witness{e, unit(n, l), "column-support"};
                }
            }
            for (std::size_t m = 0; m < n; ++m) {
                if (m == l || ms[k][m] == 0) continue;
                // Row k: ratios of M_r to M_s differ on (k, l) and (k, m).
                const Rational det = ms[k][l] * mr[k][m] - ms[k][m] * mr[k][l];
                if (det != 0) {
                    RationalVector f(n, Rational(0));
                    f[l] = (low * mr[k][m] - ms[k][m] * th.body) / det;
                    f[m] = (ms[k][l] * th.body - low * mr[k][l]) / det;
                    return Witness{unit(n, k), f, "row-ratio"};
                }
            }
            for (std::size_t m = 0; m < n; ++m) {
                if (m == k || ms[m][l] == 0) continue;
                const Rational det = ms[k][l] * mr[m][l] - ms[m][l] * mr[k][l];
                if (det != 0) {
                    RationalVector e(n, Rational(0));
                    e[k] = (low * mr[m][l] - ms[m][l] * th.body) / det;
                    e[m] = (ms[k][l] * th.body - low * mr[k][l]) / det;
                    return Witness{e, unit(n, l), "column-ratio"};
                }
            }
        }
    return std::nullopt;
}

// Fixes one side to a candidate vector; both forms become linear in the other.
std::optional<Witness> slice_search(const RationalMatrix& mr, const RationalMatrix& ms, const Thresholds& th) {
    const std::size_t n = mr.size();
    std::vector<RationalVector> candidates;
    for (std::size_t i = 0; i < n; ++i) candidates.push_back(unit(n, i));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            auto v = unit(n, i);
            v[j] = 1;
            candidates.push_back(v);
            v[j] = -1;
            candidates.push_back(v);
        }
    std::mt19937_64 rng(n);
    std::uniform_int_distribution<int> d(-3, 3);
    for (int i = 0; i < 64; ++i) {
        RationalVector v(n);
        for (auto& x : v) x = d(rng);
        candidates.push_back(v);
    }
    const RationalMatrix mrt = transpose(mr), mst = transpose(ms);
    for (const auto& c : candidates) {
        if (auto f = solve_linear_pair(mat_vec(mrt, c), mat_vec(mst, c), th)) return Witness{c, *f, "slice"};
        if (auto e = solve_linear_pair(mat_vec(mr, c), mat_vec(ms, c), th)) return Witness{*e, c, "slice"};
    }
    return std::nullopt;
}

// --- sampling ---------------------------------------------------------------

using DoubleMatrix = std::vector<std::vector<double>>;

DoubleMatrix to_doubles(const RationalMatrix& m) {
    DoubleMatrix out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (const auto& x : m[i]) out[i].push_back(to_double(x));
    return out;
}

double form(const DoubleMatrix& m, const std::vector<double>& e, const std::vector<double>& f) {
    double s = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < f.size(); ++j) s += e[i] * m[i][j] * f[j];
    return s;
}

constexpr std::size_t kBlock = 1024;

struct BlockResult {
    std::size_t violations = 0;
    std::optional<std::pair<RationalVector, RationalVector>> first;
};

struct FalsificationInput {
    const RationalMatrix& mr;
    const Rational& lambda_r;
    const RationalMatrix& ms;
    const Rational& lambda_s;
    DoubleMatrix dr, ds;
    double lr, ls;
};

BlockResult run_block(const FalsificationInput& in, std::uint64_t seed, std::size_t block, std::size_t count) {
    BlockResult out;
    const std::size_t n = in.mr.size();
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(block)));
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    std::uniform_real_distribution<double> expo(-4.0, 4.0);
    std::vector<double> e(n), f(n);
    for (std::size_t s = 0; s < count; ++s) {
        const double scale_e = std::exp2(expo(rng)), scale_f = std::exp2(expo(rng));
        for (auto& x : e) x = coord(rng) * scale_e;
        for (auto& x : f) x = coord(rng) * scale_f;
        // Generous slack in double precision; exact arithmetic decides.
        const double body = form(in.dr, e, f), head = form(in.ds, e, f);
        if (body < in.lr - 1e-6 || head >= in.ls + 1e-6) continue;
        RationalVector qe, qf;
        for (double x : e) qe.push_back(from_double(x));
        for (double x : f) qf.push_back(from_double(x));
        if (bilinear_form(in.mr, qe, qf) >= in.lambda_r && bilinear_form(in.ms, qe, qf) < in.lambda_s) {
            ++out.violations;
            if (!out.first) out.first.emplace(std::move(qe), std::move(qf));
        }
    }
    return out;
}

FalsificationReport falsify(const RationalMatrix& mr, const Rational& lambda_r, const RationalMatrix& ms,
                            const Rational& lambda_s, std::size_t samples, std::uint64_t seed, bool parallel) {
    const std::size_t n = mr.size();
    require_square(mr, n);
    require_square(ms, n);
    FalsificationInput in{mr, lambda_r, ms, lambda_s, to_doubles(mr), to_doubles(ms), to_double(lambda_r),
                          to_double(lambda_s)};
    const std::size_t blocks = (samples + kBlock - 1) / kBlock;
    std::vector<BlockResult> results(blocks);
    auto count = [&](std::size_t b) { return std::min(kBlock, samples - b * kBlock); };
    if (parallel) {
        const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t b = 0; b < nb; ++b) {
            const auto idx = static_cast<std::size_t>(b);
            results[idx] = run_block(in, seed, idx, count(idx));
        }
    } else {
        for (std::size_t b = 0; b < blocks; ++b) results[b] = run_block(in, seed, b, count(b));
    }
    FalsificationReport report;
    report.samples = samples;
    for (auto& r : results) {
        report.violations += r.violations;
        if (!report.first_violation && r.first) report.first_violation = std::move(r.first);
    }
    return report;
}

// --- SimplE -------------------------------------------------------------------

RationalVector signs(const RationalVector& v) {
    RationalVector out;
    for (const auto& x : v) out.push_back(sg(x));
    return out;
}

RationalVector times(RationalVector a, const RationalVector& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
    return a;
}

RationalVector scaled(RationalVector a, const Rational& k) {
    for (auto& x : a) x *= k;
    return a;
}

}  // namespace

// --- scoring ------------------------------------------------------------------

BilinearRelation distmult(const RationalVector& r, Rational lambda) {
    BilinearRelation out{RationalMatrix(r.size(), RationalVector(r.size(), Rational(0))), std::move(lambda)};
    for (std::size_t i = 0; i < r.size(); ++i) out.m[i][i] = r[i];
    return out;
}

BilinearRelation complex_relation(const RationalVector& re, const RationalVector& im, Rational lambda) {
    require_dim(re.size(), im.size());
    const std::size_t n = re.size();
    BilinearRelation out{RationalMatrix(2 * n, RationalVector(2 * n, Rational(0))), std::move(lambda)};
    for (std::size_t i = 0; i < n; ++i) {
        out.m[i][i] = re[i];
        out.m[n + i][n + i] = re[i];
        out.m[i][n + i] = im[i];
        out.m[n + i][i] = -im[i];
    }
    return out;
}

RationalVector complex_embedding(const RationalVector& re, const RationalVector& im) {
    require_dim(re.size(), im.size());
    RationalVector out = re;
    out.insert(out.end(), im.begin(), im.end());
    return out;
}

Rational bilinear_form(const RationalMatrix& m, const RationalVector& e, const RationalVector& f) {
    require_dim(m.size(), e.size());
    Rational s = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        require_dim(f.size(), m[i].size());
        if (e[i] == 0) continue;
        for (std::size_t j = 0; j < f.size(); ++j)
            if (m[i][j] != 0 && f[j] != 0) s += e[i] * m[i][j] * f[j];
    }
    return s;
}

Rational trilinear(const RationalVector& a, const RationalVector& b, const RationalVector& c) {
    require_dim(a.size(), b.size());
    require_dim(a.size(), c.size());
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i] * c[i];
    return s;
}

Rational score(const Relation& relation, const RationalVector& e, const RationalVector& f) {
    if (const auto* b = std::get_if<BilinearRelation>(&relation)) return -bilinear_form(b->m, e, f);
    const auto& t = std::get<TranslationRelation>(relation);
    RationalVector x = t.head_map ? mat_vec(*t.head_map, e) : e;
    const RationalVector y = t.tail_map ? mat_vec(*t.tail_map, f) : f;
    require_dim(t.r.size(), x.size());
    require_dim(t.r.size(), y.size());
    Rational d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Rational diff = x[i] + t.r[i] - y[i];
        d += t.distance == Distance::L1 ? Rational(abs(diff)) : Rational(diff * diff);
    }
    return d;
}

bool in_region(const Relation& relation, const RationalVector& e, const RationalVector& f) {
    const Rational& lambda = std::visit([](const auto& r) -> const Rational& { return r.lambda; }, relation);
    return score(relation, e, f) <= lambda;
}

Rational score(const SimplERelation& relation, const SimplEEntity& e, const SimplEEntity& f) {
    return -(trilinear(e.head, relation.r, f.tail) + trilinear(f.head, relation.ri, e.tail)) / 2;
}

bool in_region(const SimplERelation& relation, const SimplEEntity& e, const SimplEEntity& f) {
    return -trilinear(e.head, relation.r, f.tail) <= relation.lambda_r &&
           -trilinear(f.head, relation.ri, e.tail) <= relation.lambda_ri;
}

std::string to_string(const Triple& t) { return "(" + t.head + ", " + t.relation + ", " + t.tail + ")"; }

SeparationResult separates(const std::map<std::string, RationalVector>& embedding,
                           const std::map<std::string, Relation>& relations, const std::set<Triple>& positive,
                           const std::set<Triple>& negative) {
    auto holds = [&](const Triple& t) {
        auto e = embedding.find(t.head);
        if (e == embedding.end()) throw UnknownEntity(t.head);
        auto f = embedding.find(t.tail);
        if (f == embedding.end()) throw UnknownEntity(t.tail);
        auto r = relations.find(t.relation);
        if (r == relations.end()) throw UnknownRelation(t.relation);
        return in_region(r->second, e->second, f->second);
    };
    SeparationResult out;
    for (const auto& t : positive)
        if (!holds(t)) {
            out.ok = false;
            out.failure = t;
            return out;
        }
    for (const auto& t : negative)
        if (holds(t)) {
            out.ok = false;
            out.failure = t;
            return out;
        }
    return out;
}

// --- graph properties -------------------------------------------------------

std::string to_string(GraphProperty p) {
    switch (p) {
        case GraphProperty::ReflexiveNotSymmetric: return "reflexive-not-symmetric";
        case GraphProperty::ReflexiveNotTransitive: return "reflexive-not-transitive";
        case GraphProperty::PartialSaturation: return "partial-saturation";
    }
    return "unknown";
}

std::vector<GraphViolation> translation_graph_properties(const std::set<Triple>& graph,
                                                         const std::set<std::string>& subset) {
    std::set<std::string> relations, entities;
    for (const auto& t : graph) {
        relations.insert(t.relation);
        entities.insert(t.head);
        entities.insert(t.tail);
    }
    std::vector<GraphViolation> out;
    if (subset.empty()) return out;
    for (const auto& rel : relations) {
        auto has = [&](const std::string& a, const std::string& b) { return graph.count(Triple{a, rel, b}) > 0; };
        const bool reflexive = std::all_of(subset.begin(), subset.end(), [&](const std::string& s) { return has(s, s); });
        if (reflexive) {
            for (const auto& s : subset)
                for (const auto& t : subset)
                    if (has(s, t) && !has(t, s)) out.push_back({rel, GraphProperty::ReflexiveNotSymmetric, {s, t}});
            for (const auto& s : subset)
                for (const auto& t : subset)
                    for (const auto& u : subset)
                        if (has(s, t) && has(t, u) && !has(s, u))
                            out.push_back({rel, GraphProperty::ReflexiveNotTransitive, {s, t, u}});
        }
        std::optional<std::string> saturated;
        for (const auto& e : entities)
            if (std::all_of(subset.begin(), subset.end(), [&](const std::string& s) { return has(e, s); })) {
                saturated = e;
                break;
            }
        if (!saturated) continue;
        for (const auto& f : entities) {
            const auto hits = std::count_if(subset.begin(), subset.end(), [&](const std::string& s) { return has(f, s); });
            if (hits > 0 && static_cast<std::size_t>(hits) < subset.size())
                out.push_back({rel, GraphProperty::PartialSaturation, {*saturated, f}});
        }
    }
    return out;
}

// --- bilinear subsumption ---------------------------------------------------

std::string to_string(BilinearDecision::Reason r) {
    switch (r) {
        case BilinearDecision::Reason::Proportional: return "proportional";
        case BilinearDecision::Reason::BodyUnsatisfiable: return "body-unsatisfiable";
        case BilinearDecision::Reason::HeadTrivial: return "head-trivial";
        case BilinearDecision::Reason::None: return "none";
    }
    return "unknown";
}

std::optional<Rational> proportionality_factor(const RationalMatrix& m, const RationalMatrix& ms) {
    std::optional<Rational> alpha;
    for (std::size_t i = 0; i < ms.size() && !alpha; ++i)
        for (std::size_t j = 0; j < ms[i].size() && !alpha; ++j)
            if (ms[i][j] != 0) alpha = m[i][j] / ms[i][j];
    if (!alpha) return is_zero(m) ? std::optional<Rational>(0) : std::nullopt;
    for (std::size_t i = 0; i < ms.size(); ++i)
        for (std::size_t j = 0; j < ms[i].size(); ++j)
            if (m[i][j] != *alpha * ms[i][j]) return std::nullopt;
    return alpha;
}

BilinearDecision bilinear_rule_decision(const RationalMatrix& mr, const Rational& lambda_r, const RationalMatrix& ms,
                                        const Rational& lambda_s) {
    const std::size_t n = mr.size();
    require_square(mr, n);
    require_square(ms, n);
    using Kind = BilinearDecision::Kind;
    using Reason = BilinearDecision::Reason;
    BilinearDecision d;
    d.alpha = proportionality_factor(mr, ms);
    auto satisfied = [&](Reason r) {
        d.kind = Kind::Satisfied;
        d.reason = r;
        return d;
    };
    const Thresholds th{lambda_r, lambda_s};
    const bool zero_r = is_zero(mr), zero_s = is_zero(ms);

    if (zero_r && lambda_r > 0) return satisfied(Reason::BodyUnsatisfiable);
    if (zero_s && lambda_s <= 0) return satisfied(Reason::HeadTrivial);
    if (!zero_r && !zero_s && d.alpha && *d.alpha > 0 && lambda_r / *d.alpha >= lambda_s)
        return satisfied(Reason::Proportional);

    // Every remaining case has a counterexample.
    std::optional<Witness> w;
    if (zero_s) {
        // Head never holds; any body point will do.
        w = slice_search(mr, ms, th);
        if (w) w->construction = "empty-head";
    } else if (d.alpha) {
        // Both forms are multiples of x = e^T M_s f; pick x and realise it on one entry.
        const Rational& a = *d.alpha;
        Rational x = a == 0 ? lambda_s - 1 : a > 0 ? lambda_r / a : std::min<Rational>(lambda_s - 1, lambda_r / a);
        for (std::size_t k = 0; k < n && !w; ++k)
            for (std::size_t l = 0; l < n && !w; ++l)
                if (ms[k][l] != 0) w = Witness{unit(n, k), unit(n, l, x / ms[k][l]), "proportional"};
    } else {
        w = entry_constructions(mr, ms, th);
        if (!w) w = slice_search(mr, ms, th);
    }
    if (!w || !(bilinear_form(mr, w->e, w->f) >= lambda_r) || !(bilinear_form(ms, w->e, w->f) < lambda_s))
        throw std::logic_error("bilinear counterexample construction failed");
    d.kind = Kind::Counterexample;
    d.e = std::move(w->e);
    d.f = std::move(w->f);
    d.construction = std::move(w->construction);
    return d;
}

FalsificationReport falsify_bilinear(const RationalMatrix& mr, const Rational& lambda_r, const RationalMatrix& ms,
                                     const Rational& lambda_s, std::size_t samples, std::uint64_t seed) {
    return falsify(mr, lambda_r, ms, lambda_s, samples, seed, true);
}

FalsificationReport falsify_bilinear_serial(const RationalMatrix& mr, const Rational& lambda_r,
                                            const RationalMatrix& ms, const Rational& lambda_s, std::size_t samples,
                                            std::uint64_t seed) {
    return falsify(mr, lambda_r, ms, lambda_s, samples, seed, false);
}

HierarchyShape bilinear_hierarchy_shape(const std::vector<std::pair<RationalMatrix, Rational>>& relations,
                                        const RationalMatrix& ms, const Rational& lambda_s) {
    if (is_zero(ms)) throw std::invalid_argument("common relation has a zero matrix");
    // Lower bound on x; nullopt stands for +infinity (empty region).
    std::vector<std::optional<Rational>> bound;
    for (std::size_t i = 0; i < relations.size(); ++i) {
        const auto& [m, lambda] = relations[i];
        auto d = bilinear_rule_decision(m, lambda, ms, lambda_s);
        if (!d.satisfied()) throw NotAllSatisfied(i);
        if (d.reason == BilinearDecision::Reason::BodyUnsatisfiable)
            bound.emplace_back();
        else
            bound.emplace_back(lambda / *d.alpha);
    }
    auto before = [&](std::size_t a, std::size_t b) {
        if (bound[a] && bound[b] && *bound[a] != *bound[b]) return *bound[a] > *bound[b];
        if (!bound[a] != !bound[b]) return !bound[a];
        return a < b;
    };
    HierarchyShape out;
    for (std::size_t i = 0; i < relations.size(); ++i)
        (relations[i].second > 0 ? out.positive : out.nonpositive).push_back(i);
    for (auto* chain : {&out.positive, &out.nonpositive}) {
        std::sort(chain->begin(), chain->end(), before);
        for (std::size_t j = 0; j + 1 < chain->size(); ++j) {
            const auto& a = relations[(*chain)[j]];
            const auto& b = relations[(*chain)[j + 1]];
            if (!bilinear_rule_decision(a.first, a.second, b.first, b.second).satisfied())
                throw std::logic_error("hierarchy chain link failed to verify");
        }
    }
    return out;
}

// --- translation regions ----------------------------------------------------

namespace {

std::string premise_text(Premise p) {
    return p == Premise::SumInHusband ? "C_W + C_M is not inside C_H" : "C_W is not inside C_H + C_M";
}

std::string point_text(const Point& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + format_rational(p[i]);
    return s + ")";
}

}  // namespace

PremiseViolated::PremiseViolated(Premise premise, Point witness)
    : std::runtime_error(premise_text(premise) + ", witness " + point_text(witness)),
      premise(premise),
      witness(std::move(witness)) {}

std::vector<BetweennessStep> translation_subsumption_demo(const Polytope& husband, const Polytope& wife,
                                                          const Polytope& married) {
    const std::size_t n = wife.dim();
    require_dim(n, husband.dim());
    require_dim(n, married.dim());
    for (const auto& p : wife.vertices())
        for (const auto& r : married.vertices()) {
            Point sum(n);
            for (std::size_t i = 0; i < n; ++i) sum[i] = p[i] + r[i];
            if (!husband.contains(sum)) throw PremiseViolated(Premise::SumInHusband, sum);
        }
    std::vector<BetweennessStep> steps;
    for (const auto& q : wife.vertices()) {
        FeasibilityProblem lp;
        const auto& hv = husband.vertices();
        const auto& mv = married.vertices();
        std::vector<std::pair<std::size_t, Rational>> sum_h, sum_m;
        for (std::size_t j = 0; j < hv.size(); ++j) sum_h.emplace_back(lp.add_nonnegative(), Rational(1));
        for (std::size_t j = 0; j < mv.size(); ++j) sum_m.emplace_back(lp.add_nonnegative(), Rational(1));
        lp.add_equality(sum_h, 1);
        lp.add_equality(sum_m, 1);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::pair<std::size_t, Rational>> row;
            for (std::size_t j = 0; j < hv.size(); ++j) row.emplace_back(j, hv[j][i]);
            for (std::size_t j = 0; j < mv.size(); ++j) row.emplace_back(hv.size() + j, mv[j][i]);
            lp.add_equality(std::move(row), q[i]);
        }
        auto sol = lp.solve();
        if (!sol || hv.empty() || mv.empty()) throw PremiseViolated(Premise::WifeCovered, q);
        BetweennessStep step;
        step.q = q;
        step.p.assign(n, Rational(0));
        step.r.assign(n, Rational(0));
        for (std::size_t j = 0; j < hv.size(); ++j)
            for (std::size_t i = 0; i < n; ++i) step.p[i] += (*sol)[j] * hv[j][i];
        for (std::size_t j = 0; j < mv.size(); ++j)
            for (std::size_t i = 0; i < n; ++i) step.r[i] += (*sol)[hv.size() + j] * mv[j][i];
        step.shifted.resize(n);
        for (std::size_t i = 0; i < n; ++i) step.shifted[i] = q[i] + step.r[i];
        step.q_in_husband = husband.contains(step.p) && husband.contains(step.shifted) && husband.contains(q);
        steps.push_back(std::move(step));
    }
    return steps;
}

IntervalSearchReport search_interval_triples(std::size_t wanted, std::uint64_t seed) {
    IntervalSearchReport report;
    std::mt19937_64 rng(splitmix64(seed));
    std::uniform_int_distribution<int> end(-12, 12);
    auto interval = [&] {
        int a = end(rng), b = end(rng);
        if (a > b) std::swap(a, b);
        return std::make_pair(Rational(a, 4), Rational(b, 4));
    };
    constexpr std::size_t kMaxTries = 1000000;
    while (report.accepted < wanted && report.tried < kMaxTries) {
        ++report.tried;
        const auto h = interval(), w = interval(), m = interval();
        const Polytope ch(1, {{h.first}, {h.second}}), cw(1, {{w.first}, {w.second}}), cm(1, {{m.first}, {m.second}});
        std::vector<BetweennessStep> steps;
        try {
            steps = translation_subsumption_demo(ch, cw, cm);
        } catch (const PremiseViolated&) {
            continue;
        }
        ++report.accepted;
        const bool contained = std::all_of(cw.vertices().begin(), cw.vertices().end(),
                                           [&](const Point& q) { return ch.contains(q); }) &&
                               std::all_of(steps.begin(), steps.end(), [](const BetweennessStep& s) { return s.q_in_husband; });
        if (!contained) ++report.wife_not_contained;
        if (h.second < w.first || w.second < h.first) ++report.disjoint;
    }
    return report;
}

// --- SimplE composition -----------------------------------------------------

int sg(const Rational& x) { return x >= 0 ? 1 : -1; }

std::string to_string(SimplECompositionOutcome::Kind k) {
    switch (k) {
        case SimplECompositionOutcome::Kind::Counterexample: return "counterexample";
        case SimplECompositionOutcome::Kind::BodyUnsatisfiable: return "body-unsatisfiable";
        case SimplECompositionOutcome::Kind::HeadAlwaysTrue: return "head-always-true";
    }
    return "unknown";
}

SimplECompositionValues composition_values(const SimplECompositionParameters& p, const SimplECompositionWitness& w) {
    return {trilinear(w.e.head, p.r, w.f.tail), trilinear(w.f.head, p.ri, w.e.tail),
            trilinear(w.f.head, p.s, w.g.tail), trilinear(w.g.head, p.si, w.f.tail),
            trilinear(w.e.head, p.t, w.g.tail), trilinear(w.g.head, p.ti, w.e.tail)};
}

SimplECompositionOutcome simple_composition_counterexample(const SimplECompositionParameters& p) {
    const std::size_t n = p.r.size();
    for (const auto* v : {&p.ri, &p.s, &p.si, &p.t, &p.ti})
        if (v->size() != n) throw std::invalid_argument("SimplE vectors differ in dimension");
    SimplECompositionOutcome out;
    const bool t_branch = !is_zero(p.t) || p.lambda_t > 0;
    const bool ti_branch = !is_zero(p.ti) || p.lambda_ti > 0;
    if (!t_branch && !ti_branch) {
        out.kind = SimplECompositionOutcome::Kind::HeadAlwaysTrue;
        return out;
    }
    const std::pair<const RationalVector*, const Rational*> body[] = {
        {&p.r, &p.lambda_r}, {&p.ri, &p.lambda_ri}, {&p.s, &p.lambda_s}, {&p.si, &p.lambda_si}};
    for (const auto& [v, lambda] : body)
        if (is_zero(*v) && *lambda > 0) {
            out.kind = SimplECompositionOutcome::Kind::BodyUnsatisfiable;
            return out;
        }

    const RationalVector ones(n, Rational(1));
    const auto sr = signs(p.r), sri = signs(p.ri), ss = signs(p.s), ssi = signs(p.si), st = signs(p.t),
               sti = signs(p.ti);
    const Rational margin(1, 1000000000);
    Rational k = 1;
    for (int step = 0; step <= 60; ++step, k *= 2) {
        SimplECompositionWitness w;
        w.k = k;
        if (t_branch) {
            // <e_h, t, g_t> = -K sum |t_i|; each body product grows like K or K^2.
            w.e.head = ones;
            w.g.tail = scaled(st, -k);
            w.f.tail = scaled(sr, k);
            w.g.head = scaled(times(sr, ssi), k);
            w.f.head = scaled(times(st, ss), -k);
            w.e.tail = scaled(times(times(st, ss), sri), -k);
        } else {
            // <g_h, ti, e_t> = -K sum |ti_i|.
            w.e.tail = ones;
            w.g.head = scaled(sti, -k);
            w.f.tail = scaled(times(sti, ssi), -k);
            w.e.head = scaled(times(times(sti, ssi), sr), -k);
            w.f.head = scaled(sri, k);
            w.g.tail = scaled(times(sri, ss), k);
        }
        const auto v = composition_values(p, w);
        const bool body_holds = v.r >= p.lambda_r && v.ri >= p.lambda_ri && v.s >= p.lambda_s && v.si >= p.lambda_si;
        const bool head_fails = t_branch ? p.lambda_t - v.t >= margin : p.lambda_ti - v.ti >= margin;
        if (body_holds && head_fails) {
            out.witness = std::move(w);
            return out;
        }
    }
    throw std::logic_error("SimplE construction did not succeed below 2^60");
}

}  // namespace geomodel
