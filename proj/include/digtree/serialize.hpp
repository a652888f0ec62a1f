#pragma once

// CSV and JSON forms of the library's result types. CSV numbers use the
// shortest representation that round-trips; an unavailable value is an empty
// field. JSON uses null for unavailable values.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "digtree/asymptotics.hpp"
#include "digtree/moments.hpp"
#include "digtree/montecarlo.hpp"

namespace digtree {

using json = nlohmann::ordered_json;

inline constexpr const char* kFormatVersion = "1";

/// Shortest round-trip decimal; "nan"/"inf" for non-finite values.
std::string format_number(double x);

json to_json(const ModelSpec& model);
ModelSpec model_from_json(const json& j);

/// Columns: n,ES,EK,EN,ES2,EK2,EN2,ESK,ESN,EKN,VarS,VarK,VarN,CovSK,CovSN,CovKN,rhoSK,rhoSN,rhoKN
void write_csv(std::ostream& out, const MomentTable& table);
json to_json(const MomentTable& table);
MomentTable moment_table_from_json(const json& j);

/// Columns: k,re,im,tail_bound,accelerated
void write_csv(std::ostream& out, const FourierCoefficientSet& set);
json to_json(const FourierCoefficientSet& set);
FourierCoefficientSet coefficient_set_from_json(const json& j);

/// Columns: trial,S,K,N
void write_csv(std::ostream& out, const SampleSet& samples);
json to_json(const SampleSummary& summary);
json to_json(const SampleSet& samples);
SampleSet sample_set_from_json(const json& j);

json to_json(const NormalityReport& report);

/// Columns: ix,iy,x_lo,x_hi,y_lo,y_hi,count
void write_csv(std::ostream& out, const Histogram2D& hist);
json to_json(const Histogram2D& hist);
Histogram2D histogram_from_json(const json& j);

}  // namespace digtree
