#include "stsvp/trace.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace stsvp {

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::Svp: return "svp";
        case Phase::StageI: return "I";
        case Phase::StageII: return "II";
        case Phase::StageIII: return "III";
        case Phase::StageIV: return "IV";
    }
    return "?";
}

namespace {

void append_value(std::string& out, const char* key, double v) {
    if (std::isnan(v)) return;
    char buf[64];
    std::snprintf(buf, sizeof(buf), " %s=%.17g", key, v);
    out += buf;
}

} // namespace

std::string StageTrace::to_log() const {
    std::string out;
    for (const TraceRecord& r : records) {
        char head[96];
        std::snprintf(head, sizeof(head), "stage=%d phase=%s iter=%d", r.stage,
                      phase_name(r.phase), r.iteration);
        out += head;
        append_value(out, "resid", r.residual);
        append_value(out, "sig_k", r.sigma_k);
        append_value(out, "sig_k1", r.sigma_k1);
        if (r.branch >= 0)
            out += r.branch ? " branch=advance" : " branch=same-sample";
        append_value(out, "exit_thresh", r.exit_value);
        if (r.exited) out += " exited=1";
        char tail[48];
        std::snprintf(tail, sizeof(tail), " matvecs=%ld", r.matvecs);
        out += tail;
        out += '\n';
    }
    std::ostringstream summary;
    summary << "total_matvecs=" << total_matvecs
            << " budget_exhausted=" << (budget_exhausted ? 1 : 0)
            << " full_observation=" << (full_observation ? 1 : 0) << '\n';
    out += summary.str();
    return out;
}

std::vector<double> StageTrace::residual_history() const {
    std::vector<double> out;
    for (const TraceRecord& r : records)
        if (!std::isnan(r.residual)) out.push_back(r.residual);
    return out;
}

} // namespace stsvp
