#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <jpeglib.h>

#include "sphedit/pipeline.hpp"

using namespace sphedit;
using nlohmann::json;

namespace {

bool images_equal(const SphericalImage& a, const SphericalImage& b) {
    return a.width == b.width && a.height == b.height && a.channels == b.channels &&
           a.px == b.px;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("sphedit_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("complex literal parsing") {
    CHECK(parse_complex("1+1i") == Complex(1.0, 1.0));
    CHECK(parse_complex("2") == Complex(2.0, 0.0));
    CHECK(parse_complex("-0.5-2i") == Complex(-0.5, -2.0));
    CHECK(parse_complex("i") == Complex(0.0, 1.0));
    CHECK(parse_complex("-i") == Complex(0.0, -1.0));
    CHECK(parse_complex("3.5i") == Complex(0.0, 3.5));
    CHECK(parse_complex("1e-3+2e2i") == Complex(0.001, 200.0));
    CHECK(parse_point("inf").is_infinity());
    CHECK_THROWS_AS(parse_complex("zebra"), ConfigError);
    CHECK_THROWS_AS(parse_complex(""), ConfigError);
}

TEST_CASE("rational map json round trip") {
    RationalMap map{2, {Complex(0.0, -0.5), 0.0, Complex(0.0, 0.5)}, {0.0, 1.0, 0.0}};
    json j = rational_to_json(map);
    RationalMap back = rational_from_json(j);
    CHECK(back.degree == 2);
    CHECK(rational_equiv_strict(map, back, 1e-14));

    json bad = j;
    bad["extra"] = 1;
    CHECK_THROWS_AS(rational_from_json(bad), ConfigError);
}

TEST_CASE("config parsing rejects unknown keys") {
    json good = {
        {"input", "a.png"},
        {"output", "b.png"},
        {"options", {{"filter", "nearest"}, {"supersample", 2}}},
        {"stages", json::array({{{"type", "power"}, {"n", 2}}})},
    };
    PipelineConfig cfg = PipelineConfig::from_json(good);
    CHECK(cfg.stages.size() == 1);
    CHECK(cfg.options.filter == Filter::Nearest);

    json bad = good;
    bad["wat"] = 1;
    CHECK_THROWS_AS(PipelineConfig::from_json(bad), ConfigError);

    json bad_opt = good;
    bad_opt["options"]["sneaky"] = true;
    CHECK_THROWS_AS(PipelineConfig::from_json(bad_opt), ConfigError);
}

TEST_CASE("unknown stage keys and types are rejected at build time") {
    SphericalImage img = generate_test_pattern(64);
    std::ostringstream log;

    json cfg_json = {{"stages", json::array({{{"type", "power"}, {"n", 2}, {"zzz", 1}}})}};
    PipelineConfig cfg = PipelineConfig::from_json(cfg_json);
    CHECK_THROWS_AS(run_pipeline_on_image(cfg, img, 0.0, log), ConfigError);

    json cfg2_json = {{"stages", json::array({{{"type", "vortex"}}})}};
    PipelineConfig cfg2 = PipelineConfig::from_json(cfg2_json);
    CHECK_THROWS_AS(run_pipeline_on_image(cfg2, img, 0.0, log), ConfigError);
}

TEST_CASE("two mobius stages fuse to the single product stage") {
    SphericalImage img = generate_test_pattern(64);
    std::ostringstream log;

    // integer matrices keep the arithmetic exactly associative
    json staged = {{"stages", json::array({
                       {{"type", "mobius"}, {"matrix", {"2", "0", "0", "1"}}},
                       {{"type", "mobius"}, {"matrix", {"1", "1", "0", "1"}}},
                   })}};
    // applying M1 then M2 equals applying M2*M1 in one stage
    json fused = {{"stages", json::array({
                      {{"type", "mobius"}, {"matrix", {"2", "1", "0", "1"}}},
                  })}};
    SphericalImage a =
        run_pipeline_on_image(PipelineConfig::from_json(staged), img, 0.0, log);
    SphericalImage b = run_pipeline_on_image(PipelineConfig::from_json(fused), img, 0.0, log);
    CHECK(images_equal(a, b));
}

TEST_CASE("pipeline determinism across worker counts") {
    SphericalImage img = generate_test_pattern(64);
    std::ostringstream log;
    json base = {{"stages", json::array({
                     {{"type", "mobius"}, {"fix", {"0.3+0.3i", "-0.9+0.1i"}}, {"angle", 0.7}},
                     {{"type", "power"}, {"n", 2}},
                 })}};
    PipelineConfig one = PipelineConfig::from_json(base);
    one.options.jobs = 1;
    PipelineConfig many = PipelineConfig::from_json(base);
    many.options.jobs = 5;
    CHECK(images_equal(run_pipeline_on_image(one, img, 0.0, log),
                       run_pipeline_on_image(many, img, 0.0, log)));
}

TEST_CASE("jpeg files load as 8-bit RGB") {
    TempDir tmp;
    // small fixture written with libjpeg directly
    SphericalImage img = generate_test_pattern(64);
    std::string path = tmp.file("in.jpg");
    {
        jpeg_compress_struct cinfo;
        jpeg_error_mgr jerr;
        cinfo.err = jpeg_std_error(&jerr);
        jpeg_create_compress(&cinfo);
        FILE* f = std::fopen(path.c_str(), "wb");
        REQUIRE(f != nullptr);
        jpeg_stdio_dest(&cinfo, f);
        cinfo.image_width = JDIMENSION(img.width);
        cinfo.image_height = JDIMENSION(img.height);
        cinfo.input_components = 3;
        cinfo.in_color_space = JCS_RGB;
        jpeg_set_defaults(&cinfo);
        jpeg_set_quality(&cinfo, 95, TRUE);
        jpeg_start_compress(&cinfo, TRUE);
        std::vector<unsigned char> row(size_t(img.width) * 3);
        while (cinfo.next_scanline < cinfo.image_height) {
            for (int x = 0; x < img.width; ++x)
                for (int c = 0; c < 3; ++c)
                    row[size_t(x) * 3 + c] =
                        (unsigned char)(img.at(x, int(cinfo.next_scanline), c) / 257);
            unsigned char* rp = row.data();
            jpeg_write_scanlines(&cinfo, &rp, 1);
        }
        jpeg_finish_compress(&cinfo);
        jpeg_destroy_compress(&cinfo);
        std::fclose(f);
    }
    SphericalImage back = load_image(path);
    CHECK(back.width == img.width);
    CHECK(back.height == img.height);
    CHECK(back.source_depth == 8);
    // lossy codec: just require the equator band to come back blueish
    int y = img.height / 2;
    CHECK(back.at(10, y, 2) > back.at(10, y, 0));
}

TEST_CASE("png round trip through the pipeline") {
    TempDir tmp;
    SphericalImage img = generate_test_pattern(64);
    save_png(tmp.file("in.png"), img);
    SphericalImage back = load_image(tmp.file("in.png"));
    CHECK(images_equal(img, back));

    // 16-bit payload survives
    SphericalImage deep = SphericalImage::create(8, 4, 3, 16);
    for (size_t i = 0; i < deep.px.size(); ++i)
        deep.px[i] = uint16_t((i * 9257) % 65536);
    save_png(tmp.file("deep.png"), deep);
    SphericalImage deep_back = load_image(tmp.file("deep.png"));
    CHECK(images_equal(deep, deep_back));
}

TEST_CASE("run_pipeline writes output and reports frames") {
    TempDir tmp;
    save_png(tmp.file("in.png"), generate_test_pattern(64));
    PipelineConfig cfg;
    cfg.input = tmp.file("in.png");
    cfg.output = tmp.file("out.png");
    PipelineStage st;
    st.type = "power";
    st.params = json{{"n", 2}};
    cfg.stages.push_back(st);
    std::ostringstream log;
    run_pipeline(cfg, log);
    CHECK(std::filesystem::exists(cfg.output));
    CHECK(log.str().find("frame 1/1") != std::string::npos);
}

TEST_CASE("frame directory with an animated parameter") {
    TempDir tmp;
    std::filesystem::create_directories(tmp.file("frames"));
    SphericalImage img = generate_test_pattern(64);
    save_png(tmp.file("frames/a.png"), img);
    save_png(tmp.file("frames/b.png"), img);
    save_png(tmp.file("frames/c.png"), img);

    PipelineConfig cfg;
    cfg.frames_dir = tmp.file("frames");
    cfg.output = tmp.file("out_%03d.png");
    PipelineStage st;
    st.type = "mobius";
    st.params = json{{"fix", {"0", "inf"}},
                     {"angle", 0.0},
                     {"animate", {{"param", "angle"}, {"from", 0.0}, {"to", kPi}}}};
    cfg.stages.push_back(st);
    cfg.options.filter = Filter::Nearest;
    std::ostringstream log;
    run_pipeline(cfg, log);
    REQUIRE(std::filesystem::exists(tmp.file("out_000.png")));
    REQUIRE(std::filesystem::exists(tmp.file("out_002.png")));

    // frame 0 has angle 0: identical to the input
    CHECK(images_equal(load_image(tmp.file("out_000.png")), img));
    // final frame rotated by pi: half-width column shift
    SphericalImage last = load_image(tmp.file("out_002.png"));
    bool shifted = true;
    for (int y = 0; y < img.height && shifted; ++y)
        for (int x = 0; x < img.width; ++x)
            if (last.at(x, y, 0) != img.at((x + img.width / 2) % img.width, y, 0)) {
                shifted = false;
                break;
            }
    CHECK(shifted);
}

TEST_CASE("validate_pipeline reports structural problems without rendering") {
    PipelineConfig cfg;
    cfg.input = "missing.png"; // validation does not open inputs
    cfg.output = "out.png";
    PipelineStage st;
    st.type = "droste";
    st.params = json{{"lambda", 0.5}};
    cfg.stages.push_back(st);
    ValidationReport rep = validate_pipeline(cfg);
    CHECK(!rep.ok());
    REQUIRE(rep.config_issues.size() == 1);
    CHECK(rep.config_issues[0].find("lambda") != std::string::npos);

    PipelineConfig good;
    good.input = "in.png";
    good.output = "out.png";
    PipelineStage ok;
    ok.type = "power";
    ok.params = json{{"n", 3}};
    good.stages.push_back(ok);
    CHECK(validate_pipeline(good).ok());
}

TEST_CASE("stage errors carry the stage label") {
    SphericalImage img = generate_test_pattern(64);
    std::ostringstream log;
    json cfg_json = {{"stages", json::array({
                         {{"type", "power"}, {"n", 2}},
                         {{"type", "droste"}, {"lambda", 0.5}},
                     })}};
    PipelineConfig cfg = PipelineConfig::from_json(cfg_json);
    try {
        run_pipeline_on_image(cfg, img, 0.0, log);
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("stage 2 (droste)") != std::string::npos);
    }
}

TEST_CASE("non-2:1 input needs allow_nonstandard") {
    SphericalImage odd = SphericalImage::create(100, 70, 3, 8);
    std::ostringstream log;
    PipelineConfig cfg;
    PipelineStage st;
    st.type = "power";
    st.params = json{{"n", 2}};
    cfg.stages.push_back(st);
    CHECK_THROWS_AS(run_pipeline_on_image(cfg, odd, 0.0, log), ConfigError);
    cfg.allow_nonstandard = true;
    SphericalImage out = run_pipeline_on_image(cfg, odd, 0.0, log);
    CHECK(out.width == 2 * out.height);
}

TEST_CASE("schottky stage with exact disks through the pipeline config") {
    SphericalImage img = generate_test_pattern(64);
    std::ostringstream log;
    json cfg_json = {
        {"options", {{"filter", "nearest"}}},
        {"stages",
         json::array({{{"type", "schottky"},
                       {"a", {"2", "0", "0", "1"}},
                       {"disks", json::array({
                                     {{"center", "0"}, {"radius", 0.5}},
                                     {{"center", "0"}, {"radius", 1.0}, {"exterior", true}},
                                 })},
                       {"max_iter", 64}}})},
    };
    PipelineConfig cfg = PipelineConfig::from_json(cfg_json);
    SphericalImage out = run_pipeline_on_image(cfg, img, 0.0, log);
    CHECK(out.width == img.width);

    // the annulus between the disks is the black region: untouched pixels
    SampleOptions nearest;
    nearest.filter = Filter::Nearest;
    int y = img.height / 2; // equator maps to |z| = 1 (inside the annulus)
    ProjectivePoint z = equirect_to_projective(
        pixel_to_equirect(10 + 0.5, y + 0.5, img.width, img.height), nearest.orientation);
    REQUIRE(std::abs(std::abs(z.value()) - 1.0) < 0.1);
    for (int c = 0; c < 3; ++c)
        CHECK(out.at(10, y, c) == img.at(10, y, c));
}

TEST_CASE("composite stage through the pipeline config") {
    TempDir tmp;
    SphericalImage img = generate_test_pattern(64);
    save_png(tmp.file("other.png"), img);
    std::ostringstream log;
    json cfg_json = {
        {"stages",
         json::array({{{"type", "composite"},
                       {"sources",
                        json::array({
                            {{"region", {{"kind", "lon_range"}, {"min", 0.0}, {"max", kPi}}},
                             {"stages", json::array({{{"type", "power"}, {"n", 2}}})}},
                            {{"region", {{"kind", "all"}}},
                             {"input", tmp.file("other.png")},
                             {"stages", json::array({{{"type", "power"}, {"n", 2}}})}},
                        })}}})},
    };
    PipelineConfig cfg = PipelineConfig::from_json(cfg_json);
    SphericalImage out = run_pipeline_on_image(cfg, img, 0.0, log);
    // both sources are the same image with the same map: equal to plain z^2
    json plain_json = {{"stages", json::array({{{"type", "power"}, {"n", 2}}})}};
    SphericalImage plain =
        run_pipeline_on_image(PipelineConfig::from_json(plain_json), img, 0.0, log);
    CHECK(images_equal(out, plain));
}
