#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "loomkit/errors.hpp"
#include "loomkit/flow.hpp"
#include "loomkit/sim.hpp"

namespace {

using namespace loomkit;

std::string fmt_full(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double percentile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double pos = q * (sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) {
        return sorted.back();
    }
    const double frac = pos - lo;
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

struct SimulateArgs {
    std::string config_path;
    bool use_paper = false;
    std::string out_path;
};

void cmd_simulate(const SimulateArgs& args) {
    const SimConfig config =
        args.use_paper ? default_paper_config() : load_sim_config_json(args.config_path);
    const std::vector<SimRecord> records = run(config);
    export_csv(records, args.out_path);

    int flagged = 0;
    int peak = -1;
    int peak1 = -1;
    int peak2 = -1;
    for (std::size_t k = 0; k < records.size(); ++k) {
        const SimRecord& rec = records[k];
        if (rec.geometry_flagged) {
            ++flagged;
            continue;
        }
        if (peak < 0 || rec.l_true > records[peak].l_true) {
            peak = static_cast<int>(k);
        }
        if (peak1 < 0 || rec.l1 > records[peak1].l1) {
            peak1 = static_cast<int>(k);
        }
        if (peak2 < 0 || rec.l2 > records[peak2].l2) {
            peak2 = static_cast<int>(k);
        }
    }
    if (peak < 0) {
        throw LoomError(ErrorCode::BadConfig, "no usable samples in the run");
    }
    std::printf("interpretation: %s\n", describe_interpretation(config).c_str());
    std::printf("samples=%zu flagged=%d\n", records.size(), flagged);
    std::printf("peak_L_true=%s t_peak=%s\n", fmt_full(records[peak].l_true).c_str(),
                fmt_full(records[peak].time).c_str());
    std::printf("L1_at_peak=%s L2_at_peak=%s\n", fmt_full(records[peak].l1).c_str(),
                fmt_full(records[peak].l2).c_str());
    std::printf("peak_L1=%s t_peak_L1=%s\n", fmt_full(records[peak1].l1).c_str(),
                fmt_full(records[peak1].time).c_str());
    std::printf("peak_L2=%s t_peak_L2=%s\n", fmt_full(records[peak2].l2).c_str(),
                fmt_full(records[peak2].time).c_str());
}

struct LoomArgs {
    std::string flow_path;
    std::string intrinsics_path;
    double dt = 0.0;
    std::string mode = "avg";
    std::string out_map;
    std::string out_img;
    std::vector<double> thresholds;
    bool prefilter = false;
    bool zone_overlay = false;
};

void cmd_loom(const LoomArgs& args) {
    std::array<double, 3> th{};
    if (!args.out_img.empty()) {
        std::copy_n(args.thresholds.begin(), 3, th.begin());
        if (!(th[0] < th[1] && th[1] < th[2])) {
            throw LoomError(ErrorCode::BadThresholds, "thresholds must be strictly increasing");
        }
    }
    DenseFlow flow = load_flo(args.flow_path, args.dt);
    if (args.prefilter) {
        flow = box_prefilter3(flow);
    }
    const CameraIntrinsics intr = load_intrinsics_json(args.intrinsics_path);
    const AngularRateGrids rates = flow_to_angular_rates(flow, intr);
    const PartialGrids partials = spatial_partials(rates);
    const LoomingKind mode = args.mode == "est1"   ? LoomingKind::Est1
                             : args.mode == "est2" ? LoomingKind::Est2
                                                   : LoomingKind::EstAvg;
    const LoomingMap map = looming_map(rates, partials, mode);
    if (!args.out_map.empty()) {
        write_map_csv(map, args.out_map);
    }
    if (!args.out_img.empty()) {
        render_threat_map(map, th, args.out_img, args.zone_overlay);
    }

    std::vector<double> values;
    values.reserve(map.l.size());
    for (std::size_t i = 0; i < map.l.size(); ++i) {
        if (map.valid[i]) {
            values.push_back(map.l[i]);
        }
    }
    std::sort(values.begin(), values.end());
    std::printf("valid_pixels=%zu total_pixels=%zu\n", values.size(), map.l.size());
    std::printf("p05=%s p50=%s p95=%s\n", fmt_full(percentile(values, 0.05)).c_str(),
                fmt_full(percentile(values, 0.50)).c_str(),
                fmt_full(percentile(values, 0.95)).c_str());
}

struct SynthArgs {
    std::string plane_path;
    std::string motion_path;
    std::string intrinsics_path;
    double dt = 0.0;
    std::string out_path;
};

void cmd_synth(const SynthArgs& args) {
    const PlanarPatch patch = load_patch_json(args.plane_path);
    const MotionState state = load_motion_json(args.motion_path);
    const CameraIntrinsics intr = load_intrinsics_json(args.intrinsics_path);
    const DenseFlow flow = synth_flow(patch, state, intr, args.dt);
    write_flo(flow, args.out_path);
    std::size_t valid = 0;
    for (const uint8_t m : flow.valid) {
        valid += m;
    }
    std::printf("valid_pixels=%zu total_pixels=%zu\n", valid, flow.valid.size());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"looming estimation from camera motion and dense flow"};
    app.require_subcommand(1);

    SimulateArgs sim_args;
    CLI::App* sim = app.add_subcommand("simulate", "run the flyby simulator, write a CSV record");
    sim->add_option("--config", sim_args.config_path, "simulator config JSON");
    sim->add_flag("--paper", sim_args.use_paper, "use the built-in reference flyby scenario");
    sim->add_option("--out", sim_args.out_path, "output CSV path")->required();
    sim->callback([&] {
        if (sim_args.use_paper == !sim_args.config_path.empty()) {
            throw CLI::ValidationError("simulate", "exactly one of --paper or --config is required");
        }
        cmd_simulate(sim_args);
    });

    LoomArgs loom_args;
    CLI::App* loom = app.add_subcommand("loom", "looming map from a dense flow file");
    loom->add_option("--flow", loom_args.flow_path, "input .flo file")->required();
    loom->add_option("--intrinsics", loom_args.intrinsics_path, "camera intrinsics JSON")
        ->required();
    loom->add_option("--dt", loom_args.dt, "frame interval in seconds")->required();
    loom->add_option("--mode", loom_args.mode, "estimator: est1, est2 or avg")
        ->check(CLI::IsMember({"est1", "est2", "avg"}));
    loom->add_option("--out-map", loom_args.out_map, "output CSV map path");
    CLI::Option* out_img = loom->add_option("--out-img", loom_args.out_img, "output PPM path");
    CLI::Option* thr = loom->add_option("--thresholds", loom_args.thresholds,
                                        "threat thresholds a,b,c in 1/s (for --out-img)")
                           ->delimiter(',')
                           ->expected(3);
    loom->add_flag("--prefilter", loom_args.prefilter, "3x3 box prefilter on the flow");
    loom->add_flag("--zones", loom_args.zone_overlay, "quantize the image to 4 threat bands");
    out_img->needs(thr);
    loom->callback([&] { cmd_loom(loom_args); });

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "synthesize exact flow for a plane scene");
    synth->add_option("--plane", synth_args.plane_path, "plane patch JSON {a,b,c}")->required();
    synth->add_option("--motion", synth_args.motion_path, "motion JSON {t, omega}")->required();
    synth->add_option("--intrinsics", synth_args.intrinsics_path, "camera intrinsics JSON")
        ->required();
    synth->add_option("--dt", synth_args.dt, "frame interval in seconds")->required();
    synth->add_option("--out", synth_args.out_path, "output .flo path")->required();
    synth->callback([&] { cmd_synth(synth_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const loomkit::LoomError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return e.code() == loomkit::ErrorCode::BadThresholds ? 2 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "IoError: %s\n", e.what());
        return 1;
    }
    return 0;
}
