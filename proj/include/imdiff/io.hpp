#pragma once

#include <string>
#include <vector>

#include "imdiff/analysis.hpp"
#include "imdiff/config.hpp"

namespace imdiff {

// Lossless, locale-independent double formatting (%.17g).
std::string format_double(double v);

// Fixed-schema per-iteration CSV.  Column order is stable; downstream
// plotting relies on it.  Reference columns are emitted empty where no
// reference value exists (series absent, or sentinel -1 before burn-in).
inline constexpr const char* kTraceCsvHeader =
    "k,f,grad_norm,iter_err,deriv_err,theory_iter_bound,theory_deriv_envelope,a_k,b_k,gamma_k";

std::string trace_csv(const std::vector<TraceRecord>& records,
                      const std::vector<double>* deriv_err = nullptr,
                      const std::vector<double>* theory_iter_bound = nullptr,
                      const std::vector<double>* theory_deriv_envelope = nullptr);

// Summary of a full run as a JSON text record.  Serialization is lossless
// for doubles (shortest round-trip form).
std::string summary_json(const FullReport& rep, const RunConfig& cfg);

// Writes content to path via a temp file in the same directory plus rename,
// so an interrupted run never leaves a truncated file under the final name.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace imdiff
