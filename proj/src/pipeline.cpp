#include "sphedit/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>

#include "sphedit/droste.hpp"
#include "sphedit/schottky.hpp"
#include "sphedit/twist.hpp"

namespace sphedit {

namespace {
namespace fs = std::filesystem;
using nlohmann::json;

double parse_double_strict(const std::string& s) {
    try {
        size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size())
            throw ConfigError("bad number: '" + s + "'");
        return v;
    } catch (const std::invalid_argument&) {
        throw ConfigError("bad number: '" + s + "'");
    } catch (const std::out_of_range&) {
        throw ConfigError("number out of range: '" + s + "'");
    }
}

} // namespace

Complex parse_complex(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c)))
            s.push_back(c);
    if (s.empty())
        throw ConfigError("empty complex literal");
    if (s.back() != 'i' && s.back() != 'I')
        return Complex(parse_double_strict(s), 0.0);

    s.pop_back(); // drop the i
    // split into real part and imaginary coefficient at the last +/- that is
    // not an exponent sign
    size_t split = std::string::npos;
    for (size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    auto imag_value = [](const std::string& t) {
        if (t.empty() || t == "+")
            return 1.0;
        if (t == "-")
            return -1.0;
        return parse_double_strict(t);
    };
    if (split == std::string::npos)
        return Complex(0.0, imag_value(s));
    return Complex(parse_double_strict(s.substr(0, split)), imag_value(s.substr(split)));
}

ProjectivePoint parse_point(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c)))
            s.push_back(c);
    if (s == "inf" || s == "Inf" || s == "INF")
        return ProjectivePoint::infinity();
    return ProjectivePoint::affine(parse_complex(s));
}

std::string format_complex(const Complex& z) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
    return buf;
}

nlohmann::json rational_to_json(const RationalMap& map) {
    json coeffs = json::object();
    coeffs["degree"] = map.degree;
    auto list = [](const std::vector<Complex>& v) {
        json a = json::array();
        for (const Complex& c : v)
            a.push_back(json::array({c.real(), c.imag()}));
        return a;
    };
    coeffs["numerator"] = list(map.num);
    coeffs["denominator"] = list(map.den);
    return coeffs;
}

RationalMap rational_from_json(const nlohmann::json& j) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::string k = it.key();
        if (k != "degree" && k != "numerator" && k != "denominator" && k != "residual" &&
            k != "samples")
            throw ConfigError("unknown rational-map key '" + k + "'");
    }
    RationalMap map;
    map.degree = j.at("degree").get<int>();
    auto list = [](const json& a) {
        std::vector<Complex> out;
        for (const auto& e : a) {
            if (!e.is_array() || e.size() != 2)
                throw ConfigError("rational coefficients must be [re, im] pairs");
            out.emplace_back(e[0].get<double>(), e[1].get<double>());
        }
        return out;
    };
    map.num = list(j.at("numerator"));
    map.den = list(j.at("denominator"));
    map.validate();
    return map;
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a)
                ok = true;
        if (!ok)
            throw ConfigError(ctx + ": unknown key '" + it.key() + "'");
    }
}

Complex get_complex(const json& v, const std::string& ctx) {
    if (v.is_number())
        return Complex(v.get<double>(), 0.0);
    if (v.is_string())
        return parse_complex(v.get<std::string>());
    if (v.is_array() && v.size() == 2)
        return Complex(v[0].get<double>(), v[1].get<double>());
    throw ConfigError(ctx + ": expected a complex value");
}

ProjectivePoint get_point(const json& v, const std::string& ctx) {
    if (v.is_string())
        return parse_point(v.get<std::string>());
    return ProjectivePoint::affine(get_complex(v, ctx));
}

MobiusTransform get_matrix(const json& v, const std::string& ctx) {
    if (!v.is_array() || v.size() != 4)
        throw ConfigError(ctx + ": matrix needs exactly 4 entries");
    return MobiusTransform(get_complex(v[0], ctx), get_complex(v[1], ctx),
                           get_complex(v[2], ctx), get_complex(v[3], ctx));
}

Rgb8 get_rgb(const json& v, const std::string& ctx) {
    if (!v.is_array() || v.size() != 3)
        throw ConfigError(ctx + ": color needs [r, g, b]");
    int r = v[0].get<int>(), g = v[1].get<int>(), b = v[2].get<int>();
    if (r < 0 || r > 255 || g < 0 || g > 255 || b < 0 || b > 255)
        throw ConfigError(ctx + ": color channels must be 0..255");
    return {uint8_t(r), uint8_t(g), uint8_t(b)};
}

} // namespace

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
    check_keys(j, {"input", "frames", "output", "options", "stages"}, "config");
    PipelineConfig cfg;
    if (j.contains("input"))
        cfg.input = j.at("input").get<std::string>();
    if (j.contains("frames"))
        cfg.frames_dir = j.at("frames").get<std::string>();
    if (j.contains("output"))
        cfg.output = j.at("output").get<std::string>();
    if (j.contains("options")) {
        const json& o = j.at("options");
        check_keys(o,
                   {"filter", "supersample", "undefined_color", "jobs", "orientation",
                    "allow_nonstandard", "depth"},
                   "options");
        if (o.contains("filter")) {
            std::string f = o.at("filter").get<std::string>();
            if (f == "nearest")
                cfg.options.filter = Filter::Nearest;
            else if (f == "bilinear")
                cfg.options.filter = Filter::Bilinear;
            else
                throw ConfigError("options.filter must be nearest or bilinear");
        }
        if (o.contains("supersample")) {
            int ss = o.at("supersample").get<int>();
            if (ss < 1 || ss > 8)
                throw ConfigError("options.supersample must be in [1, 8]");
            cfg.options.supersample = ss;
        }
        if (o.contains("undefined_color"))
            cfg.options.undefined_color = get_rgb(o.at("undefined_color"), "options");
        if (o.contains("jobs"))
            cfg.options.jobs = o.at("jobs").get<int>();
        if (o.contains("orientation")) {
            std::string s = o.at("orientation").get<std::string>();
            if (s == "top-infinity")
                cfg.options.orientation = PoleOrientation::TopInfinity;
            else if (s == "top-zero")
                cfg.options.orientation = PoleOrientation::TopZero;
            else
                throw ConfigError("options.orientation must be top-infinity or top-zero");
        }
        if (o.contains("allow_nonstandard"))
            cfg.allow_nonstandard = o.at("allow_nonstandard").get<bool>();
        if (o.contains("depth")) {
            cfg.output_depth = o.at("depth").get<int>();
            if (cfg.output_depth != 8 && cfg.output_depth != 16)
                throw ConfigError("options.depth must be 8 or 16");
        }
    }
    if (j.contains("stages")) {
        for (const auto& s : j.at("stages")) {
            if (!s.is_object() || !s.contains("type"))
                throw ConfigError("each stage needs a 'type'");
            PipelineStage st;
            st.type = s.at("type").get<std::string>();
            st.params = s;
            st.params.erase("type");
            cfg.stages.push_back(std::move(st));
        }
    }
    return cfg;
}

PipelineConfig PipelineConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return from_json(j);
}

namespace {

// ---- stage compilation -------------------------------------------------

struct SchottkyPass {
    std::shared_ptr<SchottkyMapper> mapper;
    std::shared_ptr<std::atomic<long>> capped;
    Rgb8 sentinel;
};

struct CompiledChain {
    PullbackMap map = PullbackMap::identity();
    bool nontrivial = false;
    std::vector<SchottkyPass> schottky; // for sentinel + stats reporting
};

struct CompiledSourceSpec {
    std::function<bool(const ProjectivePoint&)> region;
    PullbackMap map;
    SphericalImage image;
    bool use_current = false;
};

struct ExecUnit {
    std::string label;
    bool composite = false;
    CompiledChain chain;
    std::vector<CompiledSourceSpec> sources;
};

json patch_animate(const json& params, double t, const std::string& ctx) {
    if (!params.contains("animate"))
        return params;
    json out = params;
    json anim = out.at("animate");
    out.erase("animate");
    auto apply_one = [&](const json& a) {
        check_keys(a, {"param", "from", "to"}, ctx + ".animate");
        std::string key = a.at("param").get<std::string>();
        double from = a.at("from").get<double>();
        double to = a.at("to").get<double>();
        out[key] = from + (to - from) * t;
    };
    if (anim.is_array())
        for (const auto& a : anim)
            apply_one(a);
    else
        apply_one(anim);
    return out;
}

std::function<bool(const ProjectivePoint&)> compile_region(const json& r,
                                                           const SampleOptions& opts,
                                                           const std::string& ctx) {
    std::string kind = r.at("kind").get<std::string>();
    if (kind == "all") {
        check_keys(r, {"kind"}, ctx);
        return [](const ProjectivePoint&) { return true; };
    }
    if (kind == "lon_range") {
        check_keys(r, {"kind", "min", "max"}, ctx);
        double lo = r.at("min").get<double>();
        double hi = r.at("max").get<double>();
        PoleOrientation orient = opts.orientation;
        return [lo, hi, orient](const ProjectivePoint& z) {
            double theta = projective_to_equirect(z, orient).theta;
            if (lo <= hi)
                return theta >= lo && theta < hi;
            return theta >= lo || theta < hi; // wrapped interval
        };
    }
    if (kind == "disk") {
        check_keys(r, {"kind", "center", "radius", "exterior"}, ctx);
        SchottkyConfig::Disk d;
        d.center = get_complex(r.at("center"), ctx);
        d.radius = r.at("radius").get<double>();
        d.exterior = r.contains("exterior") && r.at("exterior").get<bool>();
        return [d](const ProjectivePoint& z) { return d.contains(z); };
    }
    throw ConfigError(ctx + ": unknown region kind '" + kind + "'");
}

MobiusTransform mobius_from_params(const json& p, const std::string& ctx) {
    if (p.contains("matrix")) {
        check_keys(p, {"matrix", "pullback", "animate"}, ctx);
        return get_matrix(p.at("matrix"), ctx).normalized();
    }
    check_keys(p, {"fix", "angle", "scale", "pullback", "animate"}, ctx);
    if (!p.contains("fix") || !p.at("fix").is_array() || p.at("fix").size() != 2)
        throw ConfigError(ctx + ": mobius needs 'matrix' or two 'fix' points");
    ProjectivePoint a = get_point(p.at("fix")[0], ctx);
    ProjectivePoint b = get_point(p.at("fix")[1], ctx);
    double angle = p.contains("angle") ? p.at("angle").get<double>() : 0.0;
    double scale = p.contains("scale") ? p.at("scale").get<double>() : 1.0;
    if (!(scale > 0.0))
        throw ConfigError(ctx + ": mobius scale must be positive");
    return mobius_two_point(a, b, angle, scale);
}

SchottkyConfig schottky_from_params(const json& p, const SampleOptions& opts,
                                    const std::string& ctx) {
    check_keys(p, {"a", "b", "mask", "mask_ab", "disks", "max_iter", "sentinel", "animate"},
               ctx);
    SchottkyConfig cfg;
    if (!p.contains("a"))
        throw ConfigError(ctx + ": schottky needs generator 'a'");
    cfg.gen_a = get_matrix(p.at("a"), ctx).normalized();
    if (p.contains("b"))
        cfg.gen_b = get_matrix(p.at("b"), ctx).normalized();
    if (p.contains("max_iter"))
        cfg.max_iter = p.at("max_iter").get<int>();
    if (p.contains("sentinel"))
        cfg.sentinel = get_rgb(p.at("sentinel"), ctx);
    if (p.contains("disks")) {
        const json& arr = p.at("disks");
        if (!arr.is_array() || (arr.size() != 2 && arr.size() != 4))
            throw ConfigError(ctx + ": disks must list 2 or 4 disks (D_a, D_A[, D_b, D_B])");
        std::array<SchottkyConfig::Disk, 4> ds{};
        for (size_t i = 0; i < arr.size(); ++i) {
            check_keys(arr[i], {"center", "radius", "exterior"}, ctx + ".disks");
            ds[i].center = get_complex(arr[i].at("center"), ctx);
            ds[i].radius = arr[i].at("radius").get<double>();
            ds[i].exterior = arr[i].contains("exterior") && arr[i].at("exterior").get<bool>();
        }
        if (arr.size() == 2 && cfg.gen_b)
            throw ConfigError(ctx + ": generator 'b' present but only one disk pair");
        cfg.disks = ds;
    } else if (p.contains("mask")) {
        cfg.mask = load_image(p.at("mask").get<std::string>());
    } else if (p.contains("mask_ab")) {
        SphericalImage partial = load_image(p.at("mask_ab").get<std::string>());
        cfg.mask = derive_disk_regions(partial, cfg.gen_a, cfg.gen_b, opts);
    } else {
        throw ConfigError(ctx + ": schottky needs 'disks', 'mask', or 'mask_ab'");
    }
    return cfg;
}

PullbackMap compile_pointwise_stage(const std::string& type, const json& params,
                                    const SampleOptions& opts, const std::string& ctx,
                                    std::vector<SchottkyPass>* schottky_out) {
    if (type == "mobius") {
        MobiusTransform m = mobius_from_params(params, ctx);
        bool literal = params.contains("pullback") && params.at("pullback").get<bool>();
        // Stage semantics: apply the transform, i.e. pull back through its
        // inverse, unless asked for the literal pull-back matrix.
        return PullbackMap::mobius(literal ? m : m.inverse());
    }
    if (type == "power") {
        check_keys(params, {"n", "animate"}, ctx);
        return PullbackMap::power(params.at("n").get<int>());
    }
    if (type == "exp_strip" || type == "exp-strip") {
        check_keys(params, {"lambda", "animate"}, ctx);
        return PullbackMap::exp_strip(params.at("lambda").get<double>());
    }
    if (type == "droste") {
        DrosteSpec spec;
        if (params.contains("circles")) {
            check_keys(params, {"circles", "twist", "animate"}, ctx);
            const json& cs = params.at("circles");
            if (!cs.is_array() || cs.size() != 2)
                throw ConfigError(ctx + ": droste circles needs exactly 2 entries");
            check_keys(cs[0], {"center", "radius"}, ctx + ".circles");
            check_keys(cs[1], {"center", "radius"}, ctx + ".circles");
            spec = fit_annulus_from_circles(
                get_complex(cs[0].at("center"), ctx), cs[0].at("radius").get<double>(),
                get_complex(cs[1].at("center"), ctx), cs[1].at("radius").get<double>());
        } else {
            check_keys(params, {"p", "q", "lambda", "inner_radius", "twist", "animate"}, ctx);
            if (params.contains("p"))
                spec.p = get_point(params.at("p"), ctx);
            if (params.contains("q"))
                spec.q = get_point(params.at("q"), ctx);
            if (params.contains("lambda"))
                spec.lambda = params.at("lambda").get<double>();
            if (params.contains("inner_radius"))
                spec.inner_radius = params.at("inner_radius").get<double>();
        }
        if (params.contains("twist"))
            spec.twist = params.at("twist").get<int>();
        return droste_map(spec);
    }
    if (type == "lattice_twist" || type == "twist") {
        check_keys(params, {"lattice", "multiplier", "normalization", "animate"}, ctx);
        std::string lat = params.at("lattice").get<std::string>();
        LatticeSpec lattice;
        if (lat == "square")
            lattice = LatticeSpec::square();
        else if (lat == "hexagonal" || lat == "hex")
            lattice = LatticeSpec::hexagonal();
        else
            throw ConfigError(ctx + ": lattice must be square or hexagonal");
        Complex mult = get_complex(params.at("multiplier"), ctx);
        if (params.contains("normalization")) {
            MobiusTransform norm = get_matrix(params.at("normalization"), ctx);
            return LatticeTwistMap(lattice, mult, norm).as_pullback();
        }
        return LatticeTwistMap(lattice, mult).as_pullback();
    }
    if (type == "rational") {
        RationalMap map;
        if (params.contains("coeffs")) {
            check_keys(params, {"coeffs", "animate"}, ctx);
            std::ifstream in(params.at("coeffs").get<std::string>());
            if (!in)
                throw IoError(ctx + ": cannot open coefficients file");
            json j;
            try {
                in >> j;
            } catch (const json::exception& e) {
                throw ConfigError(ctx + ": bad coefficients JSON: " + e.what());
            }
            map = rational_from_json(j);
        } else {
            check_keys(params, {"degree", "numerator", "denominator", "animate"}, ctx);
            json j = params;
            map = rational_from_json(j);
        }
        return map.as_pullback();
    }
    if (type == "schottky") {
        SchottkyConfig cfg = schottky_from_params(params, opts, ctx);
        auto mapper = std::make_shared<SchottkyMapper>(cfg, opts);
        auto capped = std::make_shared<std::atomic<long>>(0);
        if (schottky_out)
            schottky_out->push_back({mapper, capped, cfg.sentinel});
        return PullbackMap("schottky", [mapper, capped](const ProjectivePoint& q) {
            SchottkyStats st;
            auto r = mapper->escape(q, &st);
            if (st.capped_pixels || st.cycle_pixels)
                capped->fetch_add(1, std::memory_order_relaxed);
            return r;
        });
    }
    throw ConfigError(ctx + ": unknown stage type '" + type + "'");
}

// Chains consecutive pointwise stages; fuses runs of Mobius stages into a
// single matrix before wrapping them.
class ChainBuilder {
public:
    explicit ChainBuilder(const SampleOptions& opts) : opts_(opts) {}

    void add(const std::string& type, const json& params, const std::string& ctx) {
        if (type == "mobius") {
            MobiusTransform m = mobius_from_params(params, ctx);
            bool literal = params.contains("pullback") && params.at("pullback").get<bool>();
            MobiusTransform s = literal ? m : m.inverse();
            pending_ = pending_ ? compose(*pending_, s) : s;
            return;
        }
        flush_mobius();
        PullbackMap stage = compile_pointwise_stage(type, params, opts_, ctx, &chain_.schottky);
        absorb(stage);
    }

    CompiledChain take() {
        flush_mobius();
        return std::move(chain_);
    }

    bool empty() const { return !chain_.nontrivial && !pending_; }

private:
    void flush_mobius() {
        if (!pending_)
            return;
        absorb(PullbackMap::mobius(*pending_));
        pending_.reset();
    }

    void absorb(const PullbackMap& stage) {
        chain_.map = chain_.nontrivial ? PullbackMap::compose(chain_.map, stage) : stage;
        chain_.nontrivial = true;
    }

    SampleOptions opts_;
    CompiledChain chain_;
    std::optional<MobiusTransform> pending_;
};

std::string with_label(const std::string& label, const char* what) {
    std::string msg(what);
    if (msg.rfind(label, 0) == 0)
        return msg; // already prefixed at the throw site
    return label + ": " + msg;
}

template <typename Fn>
auto with_stage_context(const std::string& label, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        throw ConfigError(with_label(label, e.what()));
    } catch (const IoError& e) {
        throw IoError(with_label(label, e.what()));
    } catch (const NumericError& e) {
        throw NumericError(with_label(label, e.what()));
    }
}

std::vector<ExecUnit> compile_stages(const PipelineConfig& cfg, double frame_t) {
    std::vector<ExecUnit> units;
    ChainBuilder builder(cfg.options);
    std::string chain_label;

    auto flush_chain = [&]() {
        if (builder.empty())
            return;
        ExecUnit unit;
        unit.label = chain_label.empty() ? "maps" : chain_label;
        unit.chain = builder.take();
        units.push_back(std::move(unit));
        builder = ChainBuilder(cfg.options);
        chain_label.clear();
    };

    for (size_t i = 0; i < cfg.stages.size(); ++i) {
        const PipelineStage& st = cfg.stages[i];
        std::string ctx = "stage " + std::to_string(i + 1) + " (" + st.type + ")";
        with_stage_context(ctx, [&] {
            json params = patch_animate(st.params, frame_t, ctx);
            if (st.type == "composite") {
                flush_chain();
                check_keys(params, {"sources", "animate"}, ctx);
                ExecUnit unit;
                unit.label = ctx;
                unit.composite = true;
                for (const auto& sj : params.at("sources")) {
                    check_keys(sj, {"region", "input", "stages"}, ctx + ".sources");
                    CompiledSourceSpec src;
                    src.region = compile_region(sj.at("region"), cfg.options, ctx);
                    if (sj.contains("input"))
                        src.image = load_image(sj.at("input").get<std::string>());
                    else
                        src.use_current = true;
                    ChainBuilder inner(cfg.options);
                    if (sj.contains("stages")) {
                        for (const auto& is : sj.at("stages")) {
                            std::string itype = is.at("type").get<std::string>();
                            if (itype == "composite")
                                throw ConfigError(ctx + ": composite cannot nest");
                            json ip = is;
                            ip.erase("type");
                            inner.add(itype, patch_animate(ip, frame_t, ctx), ctx);
                        }
                    }
                    CompiledChain cc = inner.take();
                    src.map = cc.nontrivial ? cc.map : PullbackMap::identity();
                    unit.sources.push_back(std::move(src));
                }
                if (unit.sources.empty())
                    throw ConfigError(ctx + ": composite needs at least one source");
                units.push_back(std::move(unit));
                return;
            }
            if (chain_label.empty())
                chain_label = ctx;
            else
                chain_label += " + " + ctx;
            builder.add(st.type, params, ctx);
        });
    }
    flush_chain();
    return units;
}

SphericalImage execute_unit(const ExecUnit& unit, const SphericalImage& current,
                            const PipelineConfig& cfg, std::ostream& log) {
    SampleOptions opts = cfg.options;
    if (!unit.chain.schottky.empty())
        opts.undefined_color = unit.chain.schottky.back().sentinel;

    SphericalImage out;
    if (unit.composite) {
        std::vector<CompositeSource> sources;
        sources.reserve(unit.sources.size());
        for (const auto& s : unit.sources)
            sources.push_back({s.region, s.map, s.use_current ? &current : &s.image});
        out = composite_pull_back(sources, current.width, current.height, opts);
    } else {
        out = pull_back(current, unit.chain.map, opts);
    }
    for (const auto& sp : unit.chain.schottky) {
        long capped = sp.capped->load();
        long total = long(current.width) * current.height;
        if (capped > 0)
            log << "  schottky: " << capped << " of " << total
                << " evaluations hit the iteration cap\n";
    }
    return out;
}

std::vector<std::string> list_frames(const std::string& dir) {
    std::vector<std::string> files;
    if (!fs::is_directory(dir))
        throw IoError("frames path is not a directory: " + dir);
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file())
            continue;
        std::string ext = e.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return char(std::tolower(c)); });
        if (ext == ".png" || ext == ".jpg" || ext == ".jpeg")
            files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw IoError("no frames found in " + dir);
    return files;
}

std::string frame_output_path(const PipelineConfig& cfg, const std::string& frame_path,
                              size_t index) {
    if (cfg.output.find('%') != std::string::npos) {
        char buf[4096];
        std::snprintf(buf, sizeof buf, cfg.output.c_str(), int(index));
        return buf;
    }
    fs::path dir(cfg.output);
    fs::path name = fs::path(frame_path).filename().replace_extension(".png");
    return (dir / name).string();
}

} // namespace

SphericalImage run_pipeline_on_image(const PipelineConfig& config, const SphericalImage& input,
                                     double frame_t, std::ostream& log) {
    SphericalImage current = input;
    if (!current.is_equirect()) {
        if (!config.allow_nonstandard)
            throw ConfigError("input aspect is not 2:1 (use allow_nonstandard to pad)");
        current = pad_to_equirect(current);
    }
    std::vector<ExecUnit> units = compile_stages(config, frame_t);
    for (const ExecUnit& unit : units) {
        current = with_stage_context(
            unit.label, [&] { return execute_unit(unit, current, config, log); });
    }
    return current;
}

ValidationReport validate_pipeline(const PipelineConfig& config) {
    ValidationReport report;
    if (config.input.empty() && config.frames_dir.empty())
        report.config_issues.push_back("no input or frames given");
    if (!config.input.empty() && !config.frames_dir.empty())
        report.config_issues.push_back("both input and frames given");
    try {
        compile_stages(config, 0.0);
    } catch (const NumericError& e) {
        report.numeric_issues.push_back(e.what());
    } catch (const Error& e) {
        report.config_issues.push_back(e.what());
    }
    return report;
}

void run_pipeline(const PipelineConfig& config, std::ostream& log) {
    if (config.output.empty())
        throw ConfigError("no output path given");
    std::vector<std::string> inputs;
    bool frames = !config.frames_dir.empty();
    if (frames)
        inputs = list_frames(config.frames_dir);
    else if (!config.input.empty())
        inputs.push_back(config.input);
    else
        throw ConfigError("no input or frames given");

    for (size_t i = 0; i < inputs.size(); ++i) {
        auto start = std::chrono::steady_clock::now();
        SphericalImage img = load_image(inputs[i]);
        double t = inputs.size() > 1 ? double(i) / double(inputs.size() - 1) : 0.0;
        SphericalImage out = run_pipeline_on_image(config, img, t, log);
        std::string out_path =
            frames ? frame_output_path(config, inputs[i], i) : config.output;
        save_png(out_path, out, config.output_depth);
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
        log << "frame " << (i + 1) << "/" << inputs.size() << ": " << inputs[i] << " -> "
            << out_path << " (" << ms << " ms)\n";
    }
}

} // namespace sphedit
