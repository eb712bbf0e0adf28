#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "sphedit/pipeline.hpp"
#include "sphedit/rational.hpp"
#include "sphedit/resample.hpp"
#include "sphedit/twist.hpp"

using namespace sphedit;
using nlohmann::json;

namespace {

struct GlobalOpts {
    int jobs = 0;
    std::string filter;
    int supersample = 0;
    std::vector<int> undefined_color;
    std::string orientation;
    bool allow_nonstandard = false;
    int depth = 0;
};

void apply_globals(PipelineConfig& cfg, const GlobalOpts& g) {
    if (g.jobs > 0)
        cfg.options.jobs = g.jobs;
    if (!g.filter.empty()) {
        if (g.filter == "nearest")
            cfg.options.filter = Filter::Nearest;
        else if (g.filter == "bilinear")
            cfg.options.filter = Filter::Bilinear;
        else
            throw ConfigError("--filter must be nearest or bilinear");
    }
    if (g.supersample > 0) {
        if (g.supersample > 8)
            throw ConfigError("--supersample must be in [1, 8]");
        cfg.options.supersample = g.supersample;
    }
    if (!g.undefined_color.empty()) {
        if (g.undefined_color.size() != 3)
            throw ConfigError("--undefined-color needs r g b");
        cfg.options.undefined_color = {uint8_t(g.undefined_color[0]),
                                       uint8_t(g.undefined_color[1]),
                                       uint8_t(g.undefined_color[2])};
    }
    if (!g.orientation.empty()) {
        if (g.orientation == "top-infinity")
            cfg.options.orientation = PoleOrientation::TopInfinity;
        else if (g.orientation == "top-zero")
            cfg.options.orientation = PoleOrientation::TopZero;
        else
            throw ConfigError("--orientation must be top-infinity or top-zero");
    }
    if (g.allow_nonstandard)
        cfg.allow_nonstandard = true;
    if (g.depth > 0) {
        if (g.depth != 8 && g.depth != 16)
            throw ConfigError("--depth must be 8 or 16");
        cfg.output_depth = g.depth;
    }
}

json matrix_json(const std::vector<std::string>& vals) {
    json m = json::array();
    for (const auto& v : vals)
        m.push_back(v);
    return m;
}

int run_and_report(const PipelineConfig& cfg) {
    run_pipeline(cfg, std::cerr);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sphere-edit: conformal transforms of equirectangular spherical images"};
    app.require_subcommand(0, 1);

    GlobalOpts g;
    if (const char* env = std::getenv("SPHERE_EDIT_JOBS"))
        g.jobs = std::atoi(env);
    app.add_option("--jobs", g.jobs, "worker threads per frame (env SPHERE_EDIT_JOBS)");
    app.add_option("--filter", g.filter, "nearest or bilinear");
    app.add_option("--supersample", g.supersample, "k x k samples per pixel, 1..8");
    app.add_option("--undefined-color", g.undefined_color, "sentinel color r g b")
        ->expected(3);
    app.add_option("--orientation", g.orientation, "top-infinity (default) or top-zero");
    app.add_flag("--allow-nonstandard", g.allow_nonstandard, "pad non-2:1 inputs");
    app.add_option("--depth", g.depth, "output PNG depth: 8 or 16");

    std::string root_config, root_input, root_output, root_frames;
    app.add_option("--config", root_config, "pipeline config JSON to run");
    app.add_option("--input", root_input, "input image (overrides config)");
    app.add_option("--frames", root_frames, "frame directory (overrides config)");
    app.add_option("--output", root_output, "output path (overrides config)");

    // ---- single-stage subcommands ----
    struct StageCmd {
        CLI::App* cmd = nullptr;
        std::string in, out, frames;
        json params = json::object();
    };
    auto add_io = [&](CLI::App* cmd, StageCmd& sc) {
        cmd->add_option("input", sc.in, "input image");
        cmd->add_option("output", sc.out, "output image")->required();
        cmd->add_option("--frames", sc.frames, "frame directory instead of a single input");
    };

    StageCmd mob;
    mob.cmd = app.add_subcommand("mobius", "rotate/scale fixing two points, or raw matrix");
    std::vector<std::string> mob_fix, mob_matrix;
    double mob_angle = 0.0, mob_scale = 1.0;
    bool mob_pullback = false;
    mob.cmd->add_option("--fix", mob_fix, "fixed point (give twice; complex or inf)");
    mob.cmd->add_option("--angle", mob_angle, "rotation angle in radians");
    mob.cmd->add_option("--scale", mob_scale, "scale factor");
    mob.cmd->add_option("--matrix", mob_matrix, "a b c d coefficients")->expected(4);
    mob.cmd->add_flag("--pullback", mob_pullback,
                      "treat the transform as the literal pull-back map");
    add_io(mob.cmd, mob);

    StageCmd pow;
    pow.cmd = app.add_subcommand("power", "pull back by z^n");
    int pow_n = 2;
    pow.cmd->add_option("--n", pow_n, "exponent, >= 2")->required();
    add_io(pow.cmd, pow);

    StageCmd exps;
    exps.cmd = app.add_subcommand("exp-strip", "pull back by -exp(-lambda (1+z)/(1-z))");
    double exp_lambda = 4.0;
    exps.cmd->add_option("--lambda", exp_lambda, "strip scale");
    add_io(exps.cmd, exps);

    StageCmd dro;
    dro.cmd = app.add_subcommand("droste", "straight or twisted annulus self-similarity");
    std::string dro_p = "0", dro_q = "inf";
    double dro_lambda = 2.0, dro_inner = 0.5;
    int dro_twist = 0;
    dro.cmd->add_option("--p", dro_p, "first limit point");
    dro.cmd->add_option("--q", dro_q, "second limit point");
    dro.cmd->add_option("--lambda", dro_lambda, "annulus ratio, > 1");
    dro.cmd->add_option("--inner-radius", dro_inner, "annulus inner radius (normalized)");
    dro.cmd->add_option("--twist", dro_twist, "spiral winding; 0 = straight");
    add_io(dro.cmd, dro);

    StageCmd twi;
    twi.cmd = app.add_subcommand("twist", "lattice-multiplier twist (square or hexagonal)");
    std::string twi_lattice = "square", twi_mult = "1+1i";
    twi.cmd->add_option("--lattice", twi_lattice, "square or hexagonal");
    twi.cmd->add_option("--multiplier", twi_mult, "ring element, e.g. 1+1i");
    add_io(twi.cmd, twi);

    StageCmd rat;
    rat.cmd = app.add_subcommand("rational", "pull back by a rational map");
    std::string rat_coeffs;
    rat.cmd->add_option("--coeffs", rat_coeffs, "coefficients JSON (from fit-rational)")
        ->required();
    add_io(rat.cmd, rat);

    StageCmd sch;
    sch.cmd = app.add_subcommand("schottky", "mask-driven Schottky group rendering");
    std::vector<std::string> sch_a, sch_b;
    std::string sch_mask, sch_mask_ab;
    int sch_iter = 100;
    sch.cmd->add_option("--a", sch_a, "generator A coefficients a b c d")->expected(4);
    sch.cmd->add_option("--b", sch_b, "generator B coefficients a b c d")->expected(4);
    sch.cmd->add_option("--mask", sch_mask, "full five-color mask PNG");
    sch.cmd->add_option("--mask-ab", sch_mask_ab, "red/green mask PNG; derives white/blue");
    sch.cmd->add_option("--max-iter", sch_iter, "escape iteration cap");
    add_io(sch.cmd, sch);

    StageCmd comp;
    comp.cmd = app.add_subcommand("composite", "multi-source pull-back (config-driven)");
    std::string comp_config;
    comp.cmd->add_option("--config", comp_config, "JSON with the composite 'sources' list")
        ->required();
    add_io(comp.cmd, comp);

    CLI::App* tp = app.add_subcommand("test-pattern", "write the procedural test pattern");
    int tp_height = 512;
    std::string tp_out;
    tp->add_option("--height", tp_height, "output height (width = 2x)");
    tp->add_option("output", tp_out, "output PNG")->required();

    CLI::App* fit = app.add_subcommand("fit-rational", "fit the rational form of a twist map");
    std::string fit_lattice = "square", fit_mult = "1+1i", fit_emit;
    int fit_degree = 0;
    uint64_t fit_seed = 20240601;
    fit->add_option("--lattice", fit_lattice, "square or hexagonal");
    fit->add_option("--multiplier", fit_mult, "ring element, e.g. 1+1i")->required();
    fit->add_option("--degree", fit_degree, "expected degree (default |m|^2)");
    fit->add_option("--emit", fit_emit, "write coefficients JSON here")->required();
    fit->add_option("--seed", fit_seed, "sample jitter seed");

    CLI::App* val = app.add_subcommand("validate", "dry-run a pipeline config");
    std::string val_config;
    val->add_option("--config", val_config, "pipeline config JSON")->required();

    // global options remain usable after a subcommand name
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*tp) {
            SphericalImage img = generate_test_pattern(tp_height);
            save_png(tp_out, img);
            return 0;
        }

        if (*fit) {
            LatticeSpec lattice =
                fit_lattice == "hexagonal" || fit_lattice == "hex" ? LatticeSpec::hexagonal()
                                                                   : LatticeSpec::square();
            Complex mult = parse_complex(fit_mult);
            LatticeTwistMap twist(lattice, mult);
            int degree = fit_degree > 0 ? fit_degree : twist.degree();
            std::vector<Complex> samples =
                default_fit_samples(degree, twist.singular_points(), fit_seed);
            FitResult result = fit_rational(twist.as_pullback(), degree, samples);
            json out = rational_to_json(result.map);
            out["residual"] = result.residual;
            out["samples"] = samples.size();
            std::ofstream f(fit_emit);
            if (!f)
                throw IoError("cannot write " + fit_emit);
            f << out.dump(2) << "\n";
            std::cerr << "fit degree " << degree << ", residual " << result.residual << "\n";
            return 0;
        }

        if (*val) {
            ValidationReport report = validate_pipeline(PipelineConfig::from_json_file(val_config));
            for (const auto& s : report.config_issues)
                std::cout << "config: " << s << "\n";
            for (const auto& s : report.numeric_issues)
                std::cout << "numeric: " << s << "\n";
            if (report.ok())
                return 0;
            return report.numeric_issues.empty() ? 2 : 4;
        }

        PipelineConfig cfg;
        bool have_stage_cmd = false;
        auto finish_stage = [&](StageCmd& sc, const std::string& type) {
            cfg.input = sc.in;
            cfg.frames_dir = sc.frames;
            cfg.output = sc.out;
            PipelineStage st;
            st.type = type;
            st.params = sc.params;
            cfg.stages.push_back(st);
            have_stage_cmd = true;
        };

        if (*mob.cmd) {
            if (!mob_matrix.empty())
                mob.params["matrix"] = matrix_json(mob_matrix);
            else {
                if (mob_fix.size() != 2)
                    throw ConfigError("mobius needs --matrix or exactly two --fix points");
                mob.params["fix"] = json::array({mob_fix[0], mob_fix[1]});
                mob.params["angle"] = mob_angle;
                mob.params["scale"] = mob_scale;
            }
            if (mob_pullback)
                mob.params["pullback"] = true;
            finish_stage(mob, "mobius");
        } else if (*pow.cmd) {
            pow.params["n"] = pow_n;
            finish_stage(pow, "power");
        } else if (*exps.cmd) {
            exps.params["lambda"] = exp_lambda;
            finish_stage(exps, "exp_strip");
        } else if (*dro.cmd) {
            dro.params["p"] = dro_p;
            dro.params["q"] = dro_q;
            dro.params["lambda"] = dro_lambda;
            dro.params["inner_radius"] = dro_inner;
            dro.params["twist"] = dro_twist;
            finish_stage(dro, "droste");
        } else if (*twi.cmd) {
            twi.params["lattice"] = twi_lattice;
            twi.params["multiplier"] = twi_mult;
            finish_stage(twi, "lattice_twist");
        } else if (*rat.cmd) {
            rat.params["coeffs"] = rat_coeffs;
            finish_stage(rat, "rational");
        } else if (*sch.cmd) {
            if (sch_a.empty())
                throw ConfigError("schottky needs --a");
            sch.params["a"] = matrix_json(sch_a);
            if (!sch_b.empty())
                sch.params["b"] = matrix_json(sch_b);
            if (!sch_mask.empty())
                sch.params["mask"] = sch_mask;
            else if (!sch_mask_ab.empty())
                sch.params["mask_ab"] = sch_mask_ab;
            else
                throw ConfigError("schottky needs --mask or --mask-ab");
            sch.params["max_iter"] = sch_iter;
            finish_stage(sch, "schottky");
        } else if (*comp.cmd) {
            std::ifstream in(comp_config);
            if (!in)
                throw IoError("cannot open " + comp_config);
            json j;
            try {
                in >> j;
            } catch (const json::exception& e) {
                throw ConfigError(std::string("composite config parse error: ") + e.what());
            }
            comp.params = j;
            finish_stage(comp, "composite");
        }

        if (!have_stage_cmd) {
            if (root_config.empty()) {
                std::cerr << app.help() << "\n";
                return 2;
            }
            cfg = PipelineConfig::from_json_file(root_config);
        }
        if (!root_input.empty())
            cfg.input = root_input;
        if (!root_frames.empty()) {
            cfg.frames_dir = root_frames;
            cfg.input.clear();
        }
        if (!root_output.empty())
            cfg.output = root_output;
        apply_globals(cfg, g);
        return run_and_report(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
