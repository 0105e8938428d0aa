#include "pinball/roots.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <utility>

namespace pinball {

namespace {

using P = Poly<Rational>;

int sign_at(const P& p, const Rational& x) { return sgn(p.eval(x)); }

// (quotient, remainder) of long division over the rationals.
std::pair<P, P> divmod(const P& a, const P& b) {
    if (b.is_zero()) fail(ErrorCode::DomainError, "polynomial division by zero");
    int db = b.degree();
    int da = a.degree();
    if (da < db) return {P(), a};
    std::vector<Rational> rem = a.coeffs();
    std::vector<Rational> quot(static_cast<size_t>(da - db) + 1, Rational(0));
    const auto& cb = b.coeffs();
    for (int k = da - db; k >= 0; --k) {
        Rational f = rem[static_cast<size_t>(k + db)] / cb[static_cast<size_t>(db)];
        quot[static_cast<size_t>(k)] = f;
        for (int j = 0; j <= db; ++j)
            rem[static_cast<size_t>(k + j)] -= f * cb[static_cast<size_t>(j)];
    }
    return {P(std::move(quot)), P(std::move(rem))};
}

// Divide by |leading coefficient|: a positive scaling, so sign patterns and
// root sets are unchanged. Keeps Sturm-chain coefficients from blowing up.
P scale_positive(const P& p) {
    if (p.is_zero()) return p;
    Rational lc = scalar_abs(p.leading());
    std::vector<Rational> c;
    c.reserve(p.coeffs().size());
    for (const auto& q : p.coeffs()) c.push_back(q / lc);
    return P(std::move(c));
}

P poly_gcd(P a, P b) {
    while (!b.is_zero()) {
        P r = divmod(a, b).second;
        a = std::move(b);
        b = scale_positive(r);
    }
    return scale_positive(a);
}

P deflate(const P& p, const Rational& r) {
    const auto& c = p.coeffs();
    std::vector<Rational> q(c.size() - 1, Rational(0));
    Rational carry = c.back();
    for (int i = static_cast<int>(c.size()) - 2; i >= 0; --i) {
        q[static_cast<size_t>(i)] = carry;
        carry = c[static_cast<size_t>(i)] + carry * r;
    }
    return P(std::move(q));
}

std::vector<P> sturm_chain(const P& sf) {
    std::vector<P> ch;
    ch.push_back(sf);
    P d = sf.derivative();
    if (d.is_zero()) return ch;
    ch.push_back(std::move(d));
    while (ch.back().degree() > 0) {
        P r = divmod(ch[ch.size() - 2], ch.back()).second;
        if (r.is_zero()) break;
        ch.push_back(scale_positive(-r));
    }
    return ch;
}

int variations(const std::vector<P>& ch, const Rational& x) {
    int v = 0;
    int last = 0;
    for (const P& p : ch) {
        int s = sign_at(p, x);
        if (s == 0) continue;
        if (last != 0 && s != last) ++v;
        last = s;
    }
    return v;
}

// Distinct roots of the square-free sf in the open interval (a,b); requires
// sf(a) != 0 and sf(b) != 0.
int count_open(const std::vector<P>& ch, const Rational& a, const Rational& b) {
    return variations(ch, a) - variations(ch, b);
}

std::optional<std::vector<mpz_class>> divisors_of(const mpz_class& n_abs) {
    mpz_class n = n_abs;
    std::vector<std::pair<mpz_class, int>> fs;
    auto pull = [&](const mpz_class& p) {
        int e = 0;
        while (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
            mpz_divexact(n.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t());
            ++e;
        }
        if (e > 0) fs.emplace_back(p, e);
    };
    pull(2);
    for (unsigned long d = 3; d <= 1000000UL && mpz_class(d) * d <= n; d += 2) pull(d);
    if (n > 1) {
        if (!mpz_probab_prime_p(n.get_mpz_t(), 32)) return std::nullopt;
        fs.emplace_back(n, 1);
    }
    std::vector<mpz_class> divs{1};
    for (const auto& [p, e] : fs) {
        size_t base = divs.size();
        std::vector<mpz_class> next = divs;
        mpz_class pe = 1;
        for (int i = 1; i <= e; ++i) {
            pe *= p;
            for (size_t j = 0; j < base; ++j) next.push_back(divs[j] * pe);
        }
        divs = std::move(next);
        if (divs.size() > 4096) return std::nullopt;
    }
    return divs;
}

// Complete list of rational roots of the square-free sf, or nullopt when the
// rational-root-theorem enumeration was infeasible.
std::optional<std::vector<Rational>> rational_roots(const P& sf) {
    std::vector<Rational> out;
    if (sf.degree() <= 0) return out;
    P w = sf;
    {
        const auto& c = w.coeffs();
        size_t k = 0;
        while (k < c.size() && sgn(c[k]) == 0) ++k;
        if (k > 0) {
            out.emplace_back(0);
            w = P(std::vector<Rational>(c.begin() + static_cast<long>(k), c.end()));
        }
    }
    int n = w.degree();
    if (n == 1) {
        out.push_back(-w.coeffs()[0] / w.coeffs()[1]);
    } else if (n == 2) {
        const auto& c = w.coeffs();
        Rational disc = c[1] * c[1] - 4 * c[2] * c[0];
        if (sgn(disc) >= 0) {
            if (auto sq = rational_sqrt_exact(disc)) {
                out.push_back((-c[1] + *sq) / (2 * c[2]));
                if (sgn(*sq) != 0) out.push_back((-c[1] - *sq) / (2 * c[2]));
            }
            // real but irrational: complete answer is still "no rational roots"
        }
    } else if (n >= 3) {
        mpz_class den_lcm = 1;
        for (const auto& q : w.coeffs()) den_lcm = lcm(den_lcm, q.get_den());
        std::vector<mpz_class> ic;
        ic.reserve(w.coeffs().size());
        for (const auto& q : w.coeffs()) {
            Rational s = q * Rational(den_lcm);
            ic.push_back(s.get_num());
        }
        mpz_class content = 0;
        for (const auto& z : ic) content = gcd(content, z);
        if (content > 1)
            for (auto& z : ic) mpz_divexact(z.get_mpz_t(), z.get_mpz_t(), content.get_mpz_t());
        auto dp = divisors_of(abs(ic.front()));
        auto dq = divisors_of(abs(ic.back()));
        if (!dp || !dq || dp->size() * dq->size() > 200000) return std::nullopt;
        for (const auto& pn : *dp) {
            for (const auto& qd : *dq) {
                if (gcd(pn, qd) != 1) continue;
                Rational cand(pn, qd);
                cand.canonicalize();
                if (sgn(w.eval(cand)) == 0) out.push_back(cand);
                Rational neg = -cand;
                if (sgn(w.eval(neg)) == 0) out.push_back(neg);
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Yun's square-free decomposition; returns the product of the factors of odd
// multiplicity (the loci where the polynomial changes sign).
P odd_multiplicity_part(const P& p) {
    P g = poly_gcd(p, p.derivative());
    if (g.degree() <= 0) return scale_positive(p);
    P w = divmod(p, g).first;
    P y = divmod(p.derivative(), g).first;
    P z = y - w.derivative();
    P acc = P::constant(Rational(1));
    int i = 1;
    while (w.degree() > 0) {
        P fi = poly_gcd(w, z);
        if (fi.degree() > 0 && (i % 2) == 1) acc = acc * fi;
        w = divmod(w, fi).first;
        y = divmod(z, fi).first;
        z = y - w.derivative();
        ++i;
    }
    return acc;
}

} // namespace

Poly<Rational> poly_square_free(const Poly<Rational>& p) {
    if (p.degree() <= 1) return scale_positive(p);
    P g = poly_gcd(p, p.derivative());
    if (g.degree() <= 0) return scale_positive(p);
    return scale_positive(divmod(p, g).first);
}

Poly<Rational> poly_to_rational(const Poly<BigFloat>& p) {
    std::vector<Rational> c;
    c.reserve(p.coeffs().size());
    for (const auto& x : p.coeffs()) c.push_back(x.to_rational());
    return Poly<Rational>(std::move(c));
}

int poly_count_roots(const Poly<Rational>& p, const Interval<Rational>& I) {
    if (p.is_zero()) fail(ErrorCode::DegenerateContact, "counting roots of the zero polynomial");
    P sf = poly_square_free(p);
    if (I.lo == I.hi)
        return (I.lo_closed && I.hi_closed && sign_at(sf, I.lo) == 0) ? 1 : 0;
    int n = 0;
    if (sign_at(sf, I.lo) == 0) {
        if (I.lo_closed) ++n;
        sf = deflate(sf, I.lo);
    }
    if (sign_at(sf, I.hi) == 0) {
        if (I.hi_closed) ++n;
        sf = deflate(sf, I.hi);
    }
    if (sf.degree() >= 1) n += count_open(sturm_chain(sf), I.lo, I.hi);
    return n;
}

std::vector<Rational> poly_roots_exact(const Poly<Rational>& p, const Interval<Rational>& I,
                                       const RootIsolationOptions&) {
    if (p.is_zero())
        fail(ErrorCode::DegenerateContact, "contact equation vanishes identically");
    P sf = poly_square_free(p);
    std::vector<Rational> out;
    if (I.lo == I.hi) {
        if (I.lo_closed && I.hi_closed && sign_at(sf, I.lo) == 0) out.push_back(I.lo);
        return out;
    }
    if (sign_at(sf, I.lo) == 0) {
        if (I.lo_closed) out.push_back(I.lo);
        sf = deflate(sf, I.lo);
    }
    if (sf.degree() >= 1 && sign_at(sf, I.hi) == 0) {
        if (I.hi_closed) out.push_back(I.hi);
        sf = deflate(sf, I.hi);
    }
    if (sf.degree() >= 1) {
        int n_open = count_open(sturm_chain(sf), I.lo, I.hi);
        if (n_open > 0) {
            auto rr = rational_roots(sf);
            std::vector<Rational> inside;
            if (rr)
                for (const auto& r : *rr)
                    if (r > I.lo && r < I.hi) inside.push_back(r);
            if (static_cast<int>(inside.size()) < n_open) {
                fail(ErrorCode::NonRationalIntersection,
                     rr ? "contact time is irrational under the exact backend"
                        : "cannot certify rational contact times (coefficients too large to "
                          "factor); rerun with the BigFloat backend");
            }
            out.insert(out.end(), inside.begin(), inside.end());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<BigFloat> poly_roots_bigfloat(const Poly<Rational>& p, const Interval<Rational>& I,
                                          mpfr_prec_t precision, const RootIsolationOptions& opt) {
    if (p.is_zero())
        fail(ErrorCode::DegenerateContact, "contact equation vanishes identically");
    long tol_exp = opt.tolerance_exp > 0 ? opt.tolerance_exp
                                         : static_cast<long>(precision) / 2 + 32;
    mpz_class tol_den = 1;
    mpz_mul_2exp(tol_den.get_mpz_t(), tol_den.get_mpz_t(), static_cast<mp_bitcnt_t>(tol_exp));
    Rational tol_width(1, tol_den);

    P sf = poly_square_free(p);
    std::vector<Rational> found;
    if (I.lo == I.hi) {
        if (I.lo_closed && I.hi_closed && sign_at(sf, I.lo) == 0) found.push_back(I.lo);
        std::vector<BigFloat> res;
        for (const auto& r : found) res.emplace_back(r, precision);
        return res;
    }
    if (sign_at(sf, I.lo) == 0) {
        if (I.lo_closed) found.push_back(I.lo);
        sf = deflate(sf, I.lo);
    }
    if (sf.degree() >= 1 && sign_at(sf, I.hi) == 0) {
        if (I.hi_closed) found.push_back(I.hi);
        sf = deflate(sf, I.hi);
    }

    struct Seg {
        Rational a, b;
        int va, vb, depth;
    };
    for (;;) {
        if (sf.degree() < 1) break;
        auto ch = sturm_chain(sf);
        std::vector<Seg> work{{I.lo, I.hi, variations(ch, I.lo), variations(ch, I.hi), 0}};
        std::vector<Seg> isolated;
        bool restart = false;
        while (!work.empty()) {
            Seg s = work.back();
            work.pop_back();
            int n = s.va - s.vb;
            if (n <= 0) continue;
            if (n == 1) {
                isolated.push_back(std::move(s));
                continue;
            }
            if (s.depth >= opt.max_bisections)
                fail(ErrorCode::AmbiguousRoot, "root isolation hit the bisection depth cap");
            Rational m = (s.a + s.b) / 2;
            if (sign_at(sf, m) == 0) {
                found.push_back(m); // interior, exactly representable
                sf = deflate(sf, m);
                restart = true;
                break;
            }
            int vm = variations(ch, m);
            work.push_back({s.a, m, s.va, vm, s.depth + 1});
            work.push_back({m, s.b, vm, s.vb, s.depth + 1});
        }
        if (restart) continue;
        for (const auto& seg : isolated) {
            Rational a = seg.a, b = seg.b;
            int sa = sign_at(sf, a);
            int depth = seg.depth;
            bool exact_hit = false;
            while (b - a > tol_width) {
                if (depth >= opt.max_bisections)
                    fail(ErrorCode::AmbiguousRoot, "root refinement hit the bisection depth cap");
                Rational m = (a + b) / 2;
                int sm = sign_at(sf, m);
                ++depth;
                if (sm == 0) {
                    found.push_back(m);
                    exact_hit = true;
                    break;
                }
                if (sm == sa) a = m;
                else b = m;
            }
            if (!exact_hit) found.push_back((a + b) / 2);
        }
        break;
    }
    std::sort(found.begin(), found.end());
    std::vector<BigFloat> res;
    res.reserve(found.size());
    for (const auto& r : found) res.emplace_back(r, precision);
    return res;
}

bool poly_nonnegative_on(const Poly<Rational>& p, const Rational& lo, const Rational& hi) {
    if (p.is_zero()) return true;
    if (hi < lo) fail(ErrorCode::InvalidGeometry, "poly_nonnegative_on: hi < lo");
    if (lo == hi) return sign_at(p, lo) >= 0;
    if (sign_at(p, lo) < 0 || sign_at(p, hi) < 0) return false;
    P crossings = odd_multiplicity_part(p);
    if (sign_at(crossings, lo) == 0) crossings = deflate(crossings, lo);
    if (crossings.degree() >= 1 && sign_at(crossings, hi) == 0) crossings = deflate(crossings, hi);
    if (crossings.degree() >= 1 && count_open(sturm_chain(crossings), lo, hi) > 0) return false;
    // No interior sign change: one nonzero sample decides the whole interval.
    Rational step = hi - lo;
    for (int k = 0; k < p.degree() + 2; ++k) {
        step /= 2;
        int s = sign_at(p, lo + step);
        if (s != 0) return s > 0;
    }
    return true; // unreachable: a nonzero polynomial has finitely many roots
}

} // namespace pinball
