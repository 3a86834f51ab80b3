#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "dimlab/construction.hpp"
#include "dimlab/counting.hpp"
#include "dimlab/dimension.hpp"
#include "dimlab/growth.hpp"
#include "dimlab/logderiv.hpp"

namespace dimlab {

using Json = nlohmann::ordered_json;

inline constexpr const char* kArtifactVersion = "0.1.0";

// Reports embed the resolved config and seed and carry no timestamps, so a
// rerun with the same config is byte-identical.
Json report_envelope(const std::string& command, const Json& config);

Json to_json(cplx v);
Json to_json(const DensityEstimate& d);
Json to_json(const RegularityCertificate& c);
Json to_json(const GrowthProfile& p);
Json to_json(const CountingData& cd);
Json to_json(const RegularZeroWindow& w);
Json to_json(const FourierReport& f);
Json to_json(const ExclusionCover& c);
Json to_json(const TwoSidedDensityReport& t);
Json to_json(const BoxDimResult& b);
Json to_json(const Region& r);
Json to_json(const NestedCollection& c);
Json to_json(const IslandGeometry& i);
Json to_json(const BuildResult& b);

NestedCollection collection_from_json(const Json& j);

// CSV with a header row, comma separator, '.' decimal point, LF endings.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace dimlab
