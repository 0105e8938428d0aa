#include "pinball/scalar.hpp"

#include <cctype>
#include <cmath>
#include <cstring>

namespace pinball {

const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::BackendMismatch: return "BackendMismatch";
        case ErrorCode::InvalidGeometry: return "InvalidGeometry";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::DegenerateContact: return "DegenerateContact";
        case ErrorCode::NonRationalIntersection: return "NonRationalIntersection";
        case ErrorCode::AmbiguousRoot: return "AmbiguousRoot";
        case ErrorCode::SimultaneousContact: return "SimultaneousContact";
        case ErrorCode::BallStopped: return "BallStopped";
        case ErrorCode::ExcludedOffset: return "ExcludedOffset";
        case ErrorCode::InvalidGadgetParams: return "InvalidGadgetParams";
        case ErrorCode::InvalidScene: return "InvalidScene";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::VerificationFailure: return "VerificationFailure";
        case ErrorCode::CompileError: return "CompileError";
        case ErrorCode::OracleHalt: return "OracleHalt";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::DecodeAmbiguous: return "DecodeAmbiguous";
        case ErrorCode::DomainError: return "DomainError";
    }
    return "UnknownError";
}

Rational rat_from_string(const std::string& text) {
    std::string s = text;
    // strip surrounding whitespace
    size_t b = s.find_first_not_of(" \t");
    size_t e = s.find_last_not_of(" \t");
    if (b == std::string::npos) fail(ErrorCode::ParseError, "empty numeric literal");
    s = s.substr(b, e - b + 1);

    auto is_int = [](const std::string& t) {
        if (t.empty()) return false;
        size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
        return true;
    };

    size_t slash = s.find('/');
    if (slash != std::string::npos) {
        std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        if (!is_int(num) || !is_int(den))
            fail(ErrorCode::ParseError, "malformed rational '" + text + "'");
        Rational q;
        if (mpq_set_str(q.get_mpq_t(), (num + "/" + den).c_str(), 10) != 0)
            fail(ErrorCode::ParseError, "malformed rational '" + text + "'");
        if (sgn(Rational(mpz_class(q.get_den()))) == 0)
            fail(ErrorCode::ParseError, "zero denominator in '" + text + "'");
        q.canonicalize();
        return q;
    }

    size_t dot = s.find('.');
    if (dot != std::string::npos) {
        std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
        bool neg = !ip.empty() && ip[0] == '-';
        if (!ip.empty() && (ip[0] == '-' || ip[0] == '+')) ip = ip.substr(1);
        if (ip.empty()) ip = "0";
        if (fp.empty() || !is_int(ip) || !is_int(fp))
            fail(ErrorCode::ParseError, "malformed decimal '" + text + "'");
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, fp.size());
        mpz_class whole(ip), frac(fp);
        mpz_class num = whole * scale + frac;
        Rational q(num, scale);
        q.canonicalize();
        if (neg) q = -q;
        return q;
    }

    if (!is_int(s)) fail(ErrorCode::ParseError, "malformed integer '" + text + "'");
    mpz_class n(s);
    return Rational(n);
}

std::string rat_to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::optional<Rational> rational_sqrt_exact(const Rational& s) {
    if (sgn(s) < 0) fail(ErrorCode::DomainError, "rational_sqrt of negative value");
    if (sgn(s) == 0) return Rational(0);
    const mpz_class &num = s.get_num(), &den = s.get_den();
    if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
        return std::nullopt;
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
    return Rational(rn, rd);
}

Rational rat_floor(const Rational& q) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return Rational(f);
}

Rational BigFloat::to_rational() const {
    if (mpfr_zero_p(v_)) return Rational(0);
    if (!mpfr_number_p(v_)) fail(ErrorCode::DomainError, "non-finite BigFloat");
    mpz_class m;
    mpfr_exp_t ex = mpfr_get_z_2exp(m.get_mpz_t(), v_);
    Rational q(m);
    mpz_class two_abs;
    mpz_ui_pow_ui(two_abs.get_mpz_t(), 2, static_cast<unsigned long>(ex < 0 ? -ex : ex));
    if (ex >= 0)
        q *= Rational(two_abs);
    else
        q /= Rational(two_abs);
    q.canonicalize();
    return q;
}

std::string BigFloat::to_string() const {
    if (mpfr_zero_p(v_)) return "0";
    if (!mpfr_number_p(v_)) fail(ErrorCode::DomainError, "non-finite BigFloat");
    // enough decimal digits to round-trip at this precision
    size_t digits = static_cast<size_t>(std::ceil(prec_ * 0.30103)) + 3;
    mpfr_exp_t ex;
    char* raw = mpfr_get_str(nullptr, &ex, 10, digits, v_, MPFR_RNDN);
    std::string mant(raw);
    mpfr_free_str(raw);
    bool neg = !mant.empty() && mant[0] == '-';
    if (neg) mant = mant.substr(1);
    // strip trailing zeros but keep at least one digit
    size_t last = mant.find_last_not_of('0');
    mant = mant.substr(0, last == std::string::npos ? 1 : last + 1);
    std::string out = std::string(neg ? "-" : "") + "0." + mant + "e" + std::to_string(ex);
    return out;
}

BigFloat BigFloat::from_string(const std::string& text, mpfr_prec_t prec) {
    BigFloat r(prec);
    if (mpfr_set_str(r.v_, text.c_str(), 10, MPFR_RNDN) != 0)
        fail(ErrorCode::ParseError, "malformed float literal '" + text + "'");
    return r;
}

} // namespace pinball
