#include "pinball/pda.hpp"

#include <openssl/evp.h>

#include <sstream>

#include "pinball/errors.hpp"

namespace pinball {

namespace {

using R = Rational;

std::string key_name(long state, int sym) {
    return "(" + std::to_string(state) + ", " + std::to_string(sym) + ")";
}

void check_bit(int b, const std::string& where) {
    if (b != 0 && b != 1)
        fail(ErrorCode::InvalidConfig, where + ": stack symbol " + std::to_string(b) +
                                           " is outside the binary alphabet");
}

} // namespace

void validate_program(const PdaProgram& p) {
    if (p.state_bits < 1 || p.state_bits > 16)
        fail(ErrorCode::CompileError,
             p.name + ": state width must be between 1 and 16 bits");
    long n_states = 1L << p.state_bits;
    if (p.initial_state < 0 || p.initial_state >= n_states)
        fail(ErrorCode::CompileError, p.name + ": initial state does not fit the state width");
    for (const auto& [key, rule] : p.rules) {
        if (key.first < 0 || key.first >= n_states)
            fail(ErrorCode::CompileError, p.name + ": transition from out-of-range state " +
                                              std::to_string(key.first));
        if (key.second != 0 && key.second != 1)
            fail(ErrorCode::CompileError, p.name + ": transition on non-binary symbol");
        if (rule.next_state < 0 || rule.next_state >= n_states)
            fail(ErrorCode::CompileError, p.name + ": transition to out-of-range state " +
                                              std::to_string(rule.next_state));
        for (int b : rule.push_a)
            if (b != 0 && b != 1)
                fail(ErrorCode::CompileError, p.name + ": push of non-binary symbol");
        for (int b : rule.push_b)
            if (b != 0 && b != 1)
                fail(ErrorCode::CompileError, p.name + ": push of non-binary symbol");
        if (p.accepting.count(key) || p.rejecting.count(key))
            fail(ErrorCode::CompileError,
                 p.name + ": key " + key_name(key.first, key.second) +
                     " is both ruled and declared halting");
    }
    // Reachable states: closure of initial_state over the rule graph.
    std::set<long> reach{p.initial_state};
    for (bool grew = true; grew;) {
        grew = false;
        for (const auto& [key, rule] : p.rules)
            if (reach.count(key.first) && !reach.count(rule.next_state)) {
                reach.insert(rule.next_state);
                grew = true;
            }
    }
    for (long q : reach)
        for (int a : {0, 1}) {
            auto key = std::make_pair(q, a);
            if (!p.rules.count(key) && !p.accepting.count(key) && !p.rejecting.count(key))
                fail(ErrorCode::CompileError, p.name + ": reachable transition " +
                                                  key_name(q, a) +
                                                  " is neither defined nor declared halting");
        }
}

void validate_config(const PdaProgram& p, const PdaConfig& c) {
    long n_states = 1L << p.state_bits;
    if (c.state < 0 || c.state >= n_states)
        fail(ErrorCode::InvalidConfig, "configuration state does not fit the state width");
    for (int b : c.stack_a) check_bit(b, "stack A");
    for (int b : c.stack_b) check_bit(b, "stack B");
    if ((long)c.stack_a.size() < p.state_bits + 2)
        fail(ErrorCode::InvalidConfig,
             "stack A must hold the state bits plus at least two bottom markers");
    for (long i = 0; i < p.state_bits; ++i)
        if (c.stack_a[i] != ((c.state >> (p.state_bits - 1 - i)) & 1))
            fail(ErrorCode::InvalidConfig,
                 "stack A's leading bits do not spell the current state");
    auto bottom_ok = [](const std::vector<int>& s) {
        size_t n = s.size();
        return n >= 2 && s[n - 1] == 1 && s[n - 2] == 1;
    };
    if (!bottom_ok(c.stack_a) || !bottom_ok(c.stack_b))
        fail(ErrorCode::InvalidConfig, "stacks must end with two 1 marker bits");
}

PdaConfig oracle_step(const PdaProgram& p, const PdaConfig& c) {
    const long ell = p.state_bits;
    PdaConfig n = c;

    // Pop the state bits plus one symbol; the bottom two markers must survive.
    if ((long)n.stack_a.size() - (ell + 1) < 2)
        fail(ErrorCode::OracleHalt, p.name + ": stack A bottom reached");
    int sym = n.stack_a[ell];
    n.stack_a.erase(n.stack_a.begin(), n.stack_a.begin() + ell + 1);

    auto key = std::make_pair(c.state, sym);
    auto it = p.rules.find(key);
    if (it == p.rules.end()) {
        if (p.accepting.count(key))
            fail(ErrorCode::OracleHalt, p.name + ": accepts at " + key_name(c.state, sym));
        fail(ErrorCode::OracleHalt, p.name + ": rejects at " + key_name(c.state, sym));
    }
    const PdaRule& rule = it->second;

    for (int b : rule.push_a) n.stack_a.insert(n.stack_a.begin(), b);
    for (int b : rule.push_b) n.stack_b.insert(n.stack_b.begin(), b);

    if (rule.transfer == StackTransfer::AtoB) {
        if (n.stack_a.size() <= 2)
            fail(ErrorCode::OracleHalt, p.name + ": transfer would strip stack A's bottom");
        n.stack_b.insert(n.stack_b.begin(), n.stack_a.front());
        n.stack_a.erase(n.stack_a.begin());
    } else if (rule.transfer == StackTransfer::BtoA) {
        if (n.stack_b.size() <= 2)
            fail(ErrorCode::OracleHalt, p.name + ": transfer would strip stack B's bottom");
        n.stack_a.insert(n.stack_a.begin(), n.stack_b.front());
        n.stack_b.erase(n.stack_b.begin());
    }

    // Next state's bits, least significant first, so the MSB lands on top.
    for (long i = 0; i < ell; ++i)
        n.stack_a.insert(n.stack_a.begin(), (int)((rule.next_state >> i) & 1));
    n.state = rule.next_state;
    return n;
}

std::vector<PdaConfig> oracle_run(const PdaProgram& p, const PdaConfig& c0, long n_steps) {
    if (n_steps < 0)
        fail(ErrorCode::InvalidConfig, "oracle_run: negative step count");
    validate_program(p);
    validate_config(p, c0);
    std::vector<PdaConfig> trace;
    trace.reserve(n_steps + 1);
    trace.push_back(c0);
    for (long i = 0; i < n_steps; ++i) trace.push_back(oracle_step(p, trace.back()));
    return trace;
}

std::string trace_json(const std::vector<PdaConfig>& trace) {
    std::ostringstream out;
    auto bits = [&out](const std::vector<int>& v) {
        out << '[';
        for (size_t i = 0; i < v.size(); ++i) {
            if (i) out << ", ";
            out << v[i];
        }
        out << ']';
    };
    out << '[';
    for (size_t i = 0; i < trace.size(); ++i) {
        if (i) out << ", ";
        out << '[' << trace[i].state << ", ";
        bits(trace[i].stack_a);
        out << ", ";
        bits(trace[i].stack_b);
        out << ']';
    }
    out << ']';
    return out.str();
}

std::string trace_digest(const std::vector<PdaConfig>& trace) {
    std::string body = trace_json(trace);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int md_len = 0;
    if (!EVP_Digest(body.data(), body.size(), md, &md_len, EVP_sha256(), nullptr))
        fail(ErrorCode::InvalidConfig, "trace_digest: hashing failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < 8; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

Rational encode_stack(const std::vector<int>& bits) {
    if (bits.empty())
        fail(ErrorCode::InvalidConfig, "encode_stack: empty stack has no offset");
    R acc = 0;
    for (auto it = bits.rbegin(); it != bits.rend(); ++it) {
        check_bit(*it, "encode_stack");
        acc = (acc + *it) / 2;
    }
    return acc;
}

EncodedConfig encode_config(const PdaConfig& c) {
    return EncodedConfig{encode_stack(c.stack_a), encode_stack(c.stack_b)};
}

std::vector<int> decode_offset(const Scalar& offset, long max_bits) {
    if (max_bits < 1)
        fail(ErrorCode::DecodeAmbiguous, "decode_offset: max_bits must be at least 1");
    std::vector<int> bits;
    if (offset.is_rational()) {
        R x = offset.rational();
        if (x <= 0 || x >= 1)
            fail(ErrorCode::DecodeAmbiguous, "decode_offset: offset must lie in (0, 1)");
        for (long i = 0; i < max_bits && x != 0; ++i) {
            x = x * 2;
            if (x >= 1) {
                bits.push_back(1);
                x = x - 1;
            } else {
                bits.push_back(0);
            }
        }
        if (x != 0)
            fail(ErrorCode::DecodeAmbiguous,
                 "decode_offset: offset is not dyadic with at most " +
                     std::to_string(max_bits) + " bits");
        return bits;
    }

    // Big-float offsets: accept a bit only while the doubled value keeps a
    // 2^-(prec/2) guard band around the 0 / 1/2 / 1 decision thresholds.
    BigFloat x = offset.bigfloat();
    const mpfr_prec_t prec = x.precision();
    const BigFloat guard(R(mpz_class(1), mpz_class(1) << (unsigned long)(prec / 2)), prec);
    const BigFloat zero(R(0), prec), half(R(1, 2), prec), one(R(1), prec);
    auto near = [&](const BigFloat& a, const BigFloat& b) { return (a - b).abs() <= guard; };
    for (long i = 0; i < max_bits; ++i) {
        if (near(x, zero)) break; // remainder is (numerically) zero: done
        if (near(x, half) || near(x, one))
            fail(ErrorCode::DecodeAmbiguous,
                 "decode_offset: value too close to a threshold at bit " + std::to_string(i));
        if (x < zero || x > one)
            fail(ErrorCode::DecodeAmbiguous, "decode_offset: offset left (0, 1)");
        if (x >= half) {
            bits.push_back(1);
            x = x + x - one;
        } else {
            bits.push_back(0);
            x = x + x;
        }
    }
    if (!near(x, zero))
        fail(ErrorCode::DecodeAmbiguous,
             "decode_offset: offset is not dyadic with at most " + std::to_string(max_bits) +
                 " bits");
    return bits;
}

std::vector<PdaSample> shipped_programs() {
    std::vector<PdaSample> out;

    // Bit-flip loop: one state, rewrites the symbol under the head forever.
    {
        PdaProgram p;
        p.name = "flip";
        p.state_bits = 1;
        p.initial_state = 0;
        p.rules[{0, 0}] = PdaRule{0, {1}, {}, StackTransfer::None};
        p.rules[{0, 1}] = PdaRule{0, {0}, {}, StackTransfer::None};
        PdaConfig c;
        c.state = 0;
        c.stack_a = {0, 1, 0, 1, 1};
        c.stack_b = {1, 1};
        out.push_back({std::move(p), std::move(c)});
    }

    // Unary counter: keeps the symbol and grows stack B by one 1 per step.
    {
        PdaProgram p;
        p.name = "counter";
        p.state_bits = 1;
        p.initial_state = 0;
        p.rules[{0, 0}] = PdaRule{0, {0}, {1}, StackTransfer::None};
        p.rules[{0, 1}] = PdaRule{0, {1}, {1}, StackTransfer::None};
        PdaConfig c;
        c.state = 0;
        c.stack_a = {0, 1, 0, 1, 1};
        c.stack_b = {1, 1};
        out.push_back({std::move(p), std::move(c)});
    }

    // Three-state mover: shuttles a symbol across the head and back every
    // three steps, exercising both transfer directions.
    {
        PdaProgram p;
        p.name = "mover";
        p.state_bits = 2;
        p.initial_state = 0;
        for (int a : {0, 1}) {
            p.rules[{0, a}] = PdaRule{1, {a}, {}, StackTransfer::AtoB};
            p.rules[{1, a}] = PdaRule{2, {a}, {}, StackTransfer::None};
            p.rules[{2, a}] = PdaRule{0, {a}, {}, StackTransfer::BtoA};
        }
        for (int a : {0, 1}) p.rejecting.insert({3, a});
        PdaConfig c;
        c.state = 0;
        c.stack_a = {0, 0, 1, 0, 1, 1, 0, 0, 1, 1};
        c.stack_b = {1, 1};
        out.push_back({std::move(p), std::move(c)});
    }
    return out;
}

} // namespace pinball
