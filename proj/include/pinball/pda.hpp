#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <pinball/gadgets.hpp>
#include <pinball/scene.hpp>

namespace pinball {

// ---------------------------------------------------------------------------
// Two-stack PDA programs and configurations.
// ---------------------------------------------------------------------------

enum class StackTransfer { None, AtoB, BtoA };

struct PdaRule {
    long next_state = 0;
    // Pushed in listed order, so the last entry ends on top.
    std::vector<int> push_a;
    std::vector<int> push_b;
    StackTransfer transfer = StackTransfer::None;
};

// Deterministic two-stack PDA over the binary alphabet. States are binary
// numbers of width state_bits. Each step pops the state bits plus one symbol
// off stack A, looks up (state, symbol), applies the rule and pushes the next
// state's bits back onto stack A.
struct PdaProgram {
    std::string name;
    long state_bits = 1;
    long initial_state = 0;
    std::map<std::pair<long, int>, PdaRule> rules;
    // Keys that halt instead of stepping. Anything neither ruled nor listed
    // here is a validation error.
    std::set<std::pair<long, int>> accepting;
    std::set<std::pair<long, int>> rejecting;
};

// stack element 0 is the top. stack_a carries the state bits on top
// (stack_a[0] = most significant state bit), mirrored by `state`; both stacks
// end with two 1 marker bits so encoded offsets stay away from 0, 1/2 and 1.
struct PdaConfig {
    long state = 0;
    std::vector<int> stack_a;
    std::vector<int> stack_b;

    bool operator==(const PdaConfig& o) const {
        return state == o.state && stack_a == o.stack_a && stack_b == o.stack_b;
    }
};

void validate_program(const PdaProgram& p);
void validate_config(const PdaProgram& p, const PdaConfig& c);

// One abstract machine step. Throws OracleHalt when the machine accepts,
// rejects, or would strip a stack below its bottom markers.
PdaConfig oracle_step(const PdaProgram& p, const PdaConfig& c);

// The n_steps+1 configurations visited from c0 (c0 included).
std::vector<PdaConfig> oracle_run(const PdaProgram& p, const PdaConfig& c0, long n_steps);

// Canonical listing of a trace: [[state, [a bits...], [b bits...]], ...]
// with ", " separators. trace_digest is the first 16 hex characters of its
// SHA-256, used to pin reference runs in tests and the CLI.
std::string trace_json(const std::vector<PdaConfig>& trace);
std::string trace_digest(const std::vector<PdaConfig>& trace);

// ---------------------------------------------------------------------------
// Offset codec.
// ---------------------------------------------------------------------------

// Binary fraction 0.b1b2...bn of the stack read top-down.
Rational encode_stack(const std::vector<int>& bits);

struct EncodedConfig {
    Rational space;
    Rational time;
};

// Space offset encodes stack A (state bits are already on it), time offset
// encodes stack B. Empty stacks are rejected with InvalidConfig.
EncodedConfig encode_config(const PdaConfig& c);

// Binary expansion of a dyadic offset in (0,1), top bit first. Exact under
// the rational backend; a big-float offset is decoded only while every
// doubling stays at least 2^-(prec/2) away from the 0 / 1/2 / 1 thresholds.
// Non-dyadic or threshold-ambiguous inputs raise DecodeAmbiguous.
std::vector<int> decode_offset(const Scalar& offset, long max_bits);

// Shipped sample programs with their start configurations.
struct PdaSample {
    PdaProgram program;
    PdaConfig start;
};
std::vector<PdaSample> shipped_programs();

// ---------------------------------------------------------------------------
// Compilation to a pinball scene.
// ---------------------------------------------------------------------------

struct GadgetPlacement {
    std::string id;   // instance id prefix inside the scene
    std::string kind; // catalog name of the placed gadget
    VecR at;          // translation applied to the fragment
};

struct CompiledMachine {
    PdaProgram program;
    Scene scene;

    Rational speed;  // ball speed everywhere in the machine
    Rational period; // step duration; every schedule's period

    // Step entry: the ball crosses this port downward at offset = space code,
    // at absolute time entry.time_base + time code (step 1).
    Port entry;
    // Step exit: pose of the merged leaf exit feeding the return loop.
    Port exit;

    // Readout: each step ends with exactly one reflection on this component.
    // For step k the contact is at x = marker_x + s and absolute time
    // marker_time + (k-1)*period + tau - s/speed, where (s, tau) encode the
    // configuration after the step.
    std::string marker_id;
    Rational marker_x;
    Rational marker_time;

    long reflections_per_step = 0; // marker included
    std::vector<GadgetPlacement> placements;
};

// Build the decision-tree scene for one machine step: pop chains branch on
// the state and symbol bits, rules push through curve and bumper stages,
// every live leaf is padded to the same duration and reflection count and
// merged back to one exit, and a mirror loop returns the ball to the entry
// with all schedules phased to the step period.
CompiledMachine compile(const PdaProgram& p, const Rational& kappa, const Rational& eps,
                        const Rational& v);

struct PdaStepResult {
    PdaConfig config;
    long reflections = 0;
};

// Inject encode_config(c0), run n_steps periods, decode the configuration at
// each step exit and count the reflections spent per step.
std::vector<PdaStepResult> step_simulate(const CompiledMachine& m, const PdaConfig& c0,
                                         long n_steps);

} // namespace pinball
