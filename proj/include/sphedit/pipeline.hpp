#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "sphedit/image.hpp"
#include "sphedit/maps.hpp"
#include "sphedit/rational.hpp"
#include "sphedit/resample.hpp"

namespace sphedit {

// Complex literals: "1+2i", "-0.5i", "3", "i"; parse_point also takes "inf".
Complex parse_complex(const std::string& text);
ProjectivePoint parse_point(const std::string& text);
std::string format_complex(const Complex& z);

nlohmann::json rational_to_json(const RationalMap& map);
RationalMap rational_from_json(const nlohmann::json& j);

struct PipelineStage {
    std::string type;
    nlohmann::json params;
};

struct PipelineConfig {
    std::string input;      // single image
    std::string frames_dir; // or a directory of frames
    std::string output;     // file, directory/, or pattern with %d
    SampleOptions options;
    bool allow_nonstandard = false;
    int output_depth = 0; // 0 = keep input depth
    std::vector<PipelineStage> stages;

    static PipelineConfig from_json(const nlohmann::json& j);
    static PipelineConfig from_json_file(const std::string& path);
};

struct ValidationReport {
    std::vector<std::string> config_issues;
    std::vector<std::string> numeric_issues;
    bool ok() const { return config_issues.empty() && numeric_issues.empty(); }
};

// Dry run: builds every stage (disk disjointness, degree sanity, map
// construction) without rendering.
ValidationReport validate_pipeline(const PipelineConfig& config);

// Renders the whole pipeline; progress and timing go to `log` (stderr in the
// CLI). Throws ConfigError/IoError/NumericError with the offending stage
// named.
void run_pipeline(const PipelineConfig& config, std::ostream& log);

// Single-frame in-memory execution, shared by run_pipeline and tests.
SphericalImage run_pipeline_on_image(const PipelineConfig& config, const SphericalImage& input,
                                     double frame_t, std::ostream& log);

} // namespace sphedit
