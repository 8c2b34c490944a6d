// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "edgewave/scene_io.hpp"
#include "edgewave/scenes.hpp"
#include "edgewave/validate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumeric = 4;

edgewave::Vec3 parse_point(const std::string& s) {
    edgewave::Vec3 p;
    char comma;
    std::istringstream ss(s);
    if (!(ss >> p.x >> comma >> p.y >> comma >> p.z)) {
        throw std::runtime_error("expected x,y,z triple: " + s);
    }
    return p;
}

struct RunOptions {
    std::string scene_path;
    std::string config_path;
    std::string source = "0,0,0";
    std::string listener = "1,0,0";
    std::string out = "ir.csv";
    std::string wav;
    int samples = -1;
    long long seed = -1;
    int workers = -1;
};

int cmd_run(const RunOptions& opt) {
    edgewave::ParsedConfig cfg;
    try {
        if (!opt.config_path.empty()) cfg = edgewave::load_config(opt.config_path);
        if (opt.samples > 0) cfg.simulation.samples = opt.samples;
        if (opt.seed >= 0) cfg.simulation.seed = static_cast<uint64_t>(opt.seed);
        if (opt.workers > 0) cfg.simulation.workers = opt.workers;
        edgewave::Vec3 source = parse_point(opt.source);
        edgewave::Vec3 listener = parse_point(opt.listener);
        edgewave::Scene scene = edgewave::assemble_scene(opt.scene_path, cfg);

        edgewave::ImpulseResponse ir =
            edgewave::render_ir(scene, cfg.simulation, source, listener);

        bool any_nonzero = false;
        for (size_t b = 0; b < ir.bin_count(); ++b) {
            double v = ir.pressure(b);
            if (!std::isfinite(v)) {
                std::cerr << "error: non-finite amplitude in bin " << b << "\n";
                return kExitNumeric;
            }
            any_nonzero |= v != 0.0;
        }
        if (!any_nonzero) {
            std::cerr << "error: no valid paths reached the listener\n";
            return kExitValidation;
        }
        ir.write_csv(opt.out);
        if (!opt.wav.empty()) ir.write_wav(opt.wav);
        std::cout << "wrote " << opt.out << " (" << ir.bin_count() << " bins, "
                  << ir.sample_count() << " samples, " << ir.dropped()
                  << " dropped paths)\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
}

int cmd_validate(const std::string& suite, uint64_t seed, const std::string& json_out) {
    std::vector<std::string> suites;
    if (suite == "all") {
        suites = {"bedrf", "sampler", "measure", "wedge-ir", "single-slit"};
    } else {
        suites = {suite};
    }
    nlohmann::json report = nlohmann::json::array();
    bool all_pass = true;
    for (const auto& name : suites) {
        edgewave::SuiteReport rep = edgewave::run_suite(name, seed);
        nlohmann::json js;
        js["suite"] = rep.suite;
        js["pass"] = rep.pass();
        js["checks"] = nlohmann::json::array();
        for (const auto& c : rep.checks) {
            js["checks"].push_back({{"name", c.name},
                                    {"pass", c.pass},
                                    {"value", c.value},
                                    {"threshold", c.threshold},
                                    {"detail", c.detail}});
            std::printf("[%s] %-32s %s  (%s)\n", rep.suite.c_str(), c.name.c_str(),
                        c.pass ? "PASS" : "FAIL", c.detail.c_str());
        }
        report.push_back(js);
        all_pass &= rep.pass();
    }
    if (!json_out.empty()) {
        std::ofstream f(json_out);
        f << report.dump(2) << "\n";
    }
    return all_pass ? kExitOk : kExitValidation;
}

int cmd_bench(const std::string& scene_path, const std::string& config_path) {
    try {
        edgewave::ParsedConfig cfg;
        if (!config_path.empty()) cfg = edgewave::load_config(config_path);
        edgewave::Scene scene;
        if (scene_path.empty()) {
            scene = edgewave::scenes::boxes().scene;
            std::cout << "scene: built-in boxes benchmark\n";
        } else {
            scene = edgewave::assemble_scene(scene_path, cfg);
        }
        edgewave::Vec3 source{-7.5, 2.0, 8.0};
        edgewave::Vec3 listener{7.5, 2.0, -8.0};
        cfg.simulation.diffraction_only = true;

        auto time_one = [&](int samples, int workers) {
            edgewave::SimulationConfig c = cfg.simulation;
            c.samples = samples;
            c.workers = workers;
            auto t0 = std::chrono::steady_clock::now();
            edgewave::ImpulseResponse ir = edgewave::render_ir(scene, c, source, listener);
            auto t1 = std::chrono::steady_clock::now();
            (void)ir;
            return std::chrono::duration<double, std::milli>(t1 - t0).count();
        };
        time_one(1000, 1);  // warm-up
        double t12k = time_one(12000, 1);
        double t6k = time_one(6000, 1);
        std::printf("per-IR time, 12000 samples, 1 worker: %.1f ms (budget 500 ms)\n",
                    t12k);
        std::printf("per-IR time,  6000 samples, 1 worker: %.1f ms (scaling %.2f)\n",
                    t6k, t6k / t12k);
        if (cfg.simulation.workers > 1) {
            double tw = time_one(12000, cfg.simulation.workers);
            std::printf("per-IR time, 12000 samples, %d workers: %.1f ms\n",
                        cfg.simulation.workers, tw);
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"edgewave: time-domain geometric acoustics with edge diffraction"};
    app.require_subcommand(1);

    RunOptions run_opt;
    CLI::App* run = app.add_subcommand("run", "render an impulse response to CSV");
    run->add_option("--scene", run_opt.scene_path, "OBJ scene file")->required();
    run->add_option("--config", run_opt.config_path, "configuration file");
    run->add_option("--source", run_opt.source, "source position x,y,z");
    run->add_option("--listener", run_opt.listener, "listener position x,y,z");
    run->add_option("--samples", run_opt.samples, "samples per IR");
    run->add_option("--seed", run_opt.seed, "RNG seed");
    run->add_option("--workers", run_opt.workers, "worker threads");
    run->add_option("--out", run_opt.out, "output CSV path");
    run->add_option("--wav", run_opt.wav, "optional 16-bit PCM WAV output");

    std::string suite = "all";
    std::string json_out;
    long long vseed = 1;
    CLI::App* val = app.add_subcommand("validate", "run oracle comparison suites");
    val->add_option("suite", suite,
                    "bedrf | sampler | measure | wedge-ir | single-slit | all");
    val->add_option("--seed", vseed, "RNG seed");
    val->add_option("--json", json_out, "machine-readable report path");

    std::string bench_scene, bench_config;
    CLI::App* bench = app.add_subcommand("bench", "timing report");
    bench->add_option("--scene", bench_scene, "OBJ scene (default: built-in boxes)");
    bench->add_option("--config", bench_config, "configuration file");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(run_opt);
    if (val->parsed()) return cmd_validate(suite, static_cast<uint64_t>(vseed), json_out);
    if (bench->parsed()) return cmd_bench(bench_scene, bench_config);
    return kExitBadInput;
}
