#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace stsvp {

enum class Phase { Svp, StageI, StageII, StageIII, StageIV };

const char* phase_name(Phase p);

enum class StageOutcome { AdvancedAtGap, AdvancedAfterIV, Exited };

/// One solver event: an iteration of some phase, or a branch decision.
/// Fields that a phase does not produce stay NaN / -1 and are omitted from
/// the log line.
struct TraceRecord {
    int stage = 0;  // 1-based; 0 for plain SVP iterations
    Phase phase = Phase::Svp;
    int iteration = 0;  // 1-based within the phase
    double residual = std::numeric_limits<double>::quiet_NaN();
    double sigma_k = std::numeric_limits<double>::quiet_NaN();
    double sigma_k1 = std::numeric_limits<double>::quiet_NaN();
    int branch = -1;  // Step II: 1 = spectrum still large, advance; 0 = run III/IV
    double exit_value = std::numeric_limits<double>::quiet_NaN();
    bool exited = false;
    long matvecs = 0;
};

struct StageSummary {
    int stage = 0;
    StageOutcome outcome = StageOutcome::AdvancedAtGap;
};

/// Per-iteration diagnostics of a solve, plus matvec accounting.
struct StageTrace {
    std::vector<TraceRecord> records;
    std::vector<StageSummary> stages;
    long total_matvecs = 0;
    bool budget_exhausted = false;
    bool full_observation = false;

    /// Line-oriented log: "stage=k phase=I iter=t resid=... sig_k=...
    /// sig_k1=... branch=..." with one line per record.
    std::string to_log() const;

    std::vector<double> residual_history() const;
};

} // namespace stsvp
