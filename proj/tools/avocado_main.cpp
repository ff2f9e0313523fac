// avocado_main.cpp - command-line surface: register, warp, jacobian, metrics,
// phantom generation, and the landmark-perturbation study.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "avocado/config.hpp"
#include "avocado/landmark_io.hpp"
#include "avocado/metaimage.hpp"
#include "avocado/metrics.hpp"
#include "avocado/phantoms.hpp"
#include "avocado/pipeline.hpp"
#include "avocado/report.hpp"

namespace fs = std::filesystem;
using namespace avocado;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory " + dir + ": " + ec.message());
}

std::vector<double> parse_sigma_list(const std::string& csv) {
    std::vector<double> out;
    std::string cur;
    std::istringstream iss(csv);
    while (std::getline(iss, cur, ',')) {
        try {
            out.push_back(std::stod(cur));
        } catch (const std::exception&) {
            throw DataError("perturb-study: malformed sigma '" + cur + "'");
        }
    }
    if (out.empty()) throw DataError("perturb-study: empty sigma list");
    return out;
}

int cmd_register(const std::string& target_path, const std::string& source_path,
                 const std::string& landmarks_path, const std::string& config_path,
                 const std::string& validation_path, const std::string& mask_path,
                 const std::string& out_dir) {
    RunConfig config;
    if (!config_path.empty()) config = load_config(config_path);

    const ScalarField target = read_volume(target_path);
    const ScalarField source = read_volume(source_path);
    const LandmarkSet landmarks = read_landmarks(landmarks_path);

    if (config.mode_is_field_path()) {
        ScalarField alpha = read_volume(config.mode);
        require_same_grid(alpha.grid(), target.grid(), "register alpha field");
        config.params.alpha_field = std::move(alpha);
    }

    ensure_dir(out_dir);
    RegistrationResult result = avocado::avocado(target, source, landmarks, config.params);

    if (!validation_path.empty()) {
        const LandmarkSet validation = read_landmarks(validation_path);
        const TreResult tre = target_registration_error(result.map, validation);
        result.metrics.tre_per_landmark = tre.tre;
        result.metrics.tre_valid = tre.valid;
        result.metrics.tre_mean = tre.mean();
        result.metrics.tre_std = tre.stddev();
        result.metrics.has_tre = true;
    }
    if (!mask_path.empty()) {
        const ScalarField mask = read_volume(mask_path);
        const ScalarField warped_mask = warp_segmentation(mask, result.map);
        result.metrics.volume_before = mask_volume(mask);
        result.metrics.volume_after = mask_volume(warped_mask);
        result.metrics.volume_change_pct =
            100.0 * (result.metrics.volume_after - result.metrics.volume_before) /
            result.metrics.volume_before;
        result.metrics.has_volume = true;
        write_volume(warped_mask, (fs::path(out_dir) / "warped_mask.mhd").string());
    }

    write_map(result.map, (fs::path(out_dir) / "map.mhd").string());
    write_volume(compose_warp(source, result.map), (fs::path(out_dir) / "warped.mhd").string());
    save_config(config, (fs::path(out_dir) / "config_used.json").string());
    {
        std::ofstream rep(fs::path(out_dir) / "report.txt");
        if (!rep) throw DataError("cannot write report in " + out_dir);
        write_report(rep, result, config);
    }
    std::cout << "registration complete: " << out_dir << "/report.txt\n";
    return kExitOk;
}

int cmd_warp(const std::string& image_path, const std::string& map_path,
             const std::string& out_path, bool binary, double threshold) {
    const ScalarField image = read_volume(image_path);
    const InverseMap map = read_map(map_path);
    const ScalarField out =
        binary ? warp_segmentation(image, map, threshold) : compose_warp(image, map);
    write_volume(out, out_path);
    return kExitOk;
}

int cmd_jacobian(const std::string& map_path, const std::string& out_path) {
    const InverseMap map = read_map(map_path);
    const ScalarField jac = jacobian_determinant(map);
    double mn = jac[0], mx = jac[0], sum = 0.0;
    for (std::size_t i = 0; i < jac.size(); ++i) {
        mn = std::min(mn, jac[i]);
        mx = std::max(mx, jac[i]);
        sum += jac[i];
    }
    if (!out_path.empty()) write_volume(jac, out_path);
    std::cout << "jacobian_min = " << format_double(mn) << "\n";
    std::cout << "jacobian_mean = " << format_double(sum / static_cast<double>(jac.size()))
              << "\n";
    std::cout << "jacobian_max = " << format_double(mx) << "\n";
    return kExitOk;
}

int cmd_metrics(const std::string& map_path, const std::string& landmarks_path,
                const std::string& mask_before_path, const std::string& mask_after_path,
                const std::vector<std::string>& dice_paths, const std::string& out_path) {
    MetricsReport m;
    if (!map_path.empty()) {
        const InverseMap map = read_map(map_path);
        const ScalarField jac = jacobian_determinant(map);
        double mn = jac[0], mx = jac[0], sum = 0.0;
        for (std::size_t i = 0; i < jac.size(); ++i) {
            mn = std::min(mn, jac[i]);
            mx = std::max(mx, jac[i]);
            sum += jac[i];
        }
        m.jacobian_min = mn;
        m.jacobian_max = mx;
        m.jacobian_mean = sum / static_cast<double>(jac.size());
        m.has_jacobian = true;

        if (!landmarks_path.empty()) {
            const LandmarkSet validation = read_landmarks(landmarks_path);
            const TreResult tre = target_registration_error(map, validation);
            m.tre_per_landmark = tre.tre;
            m.tre_valid = tre.valid;
            m.tre_mean = tre.mean();
            m.tre_std = tre.stddev();
            m.has_tre = true;
        }
    }
    if (!mask_before_path.empty() != !mask_after_path.empty())
        throw DataError("metrics: --mask-before and --mask-after must be given together");
    if (!mask_before_path.empty()) {
        m.volume_before = mask_volume(read_volume(mask_before_path));
        m.volume_after = mask_volume(read_volume(mask_after_path));
        m.volume_change_pct = 100.0 * (m.volume_after - m.volume_before) / m.volume_before;
        m.has_volume = true;
    }
    if (!dice_paths.empty()) {
        const ScalarField a = read_volume(dice_paths[0]);
        const ScalarField b = read_volume(dice_paths[1]);
        m.dice_value = dice(a, b);
        m.dice_both_empty = (mask_volume(a) == 0.0 && mask_volume(b) == 0.0);
    }
    write_metrics_block(std::cout, m);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw DataError("metrics: cannot write " + out_path);
        write_metrics_block(out, m);
    }
    return kExitOk;
}

void write_case_dir(const PhantomCase& c, const std::string& out_dir, const std::string& kind) {
    ensure_dir(out_dir);
    const fs::path dir(out_dir);
    write_volume(c.source, (dir / "source.mhd").string());
    write_volume(c.target, (dir / "target.mhd").string());
    write_volume(c.source_mask, (dir / "source_mask.mhd").string());
    write_volume(c.target_mask, (dir / "target_mask.mhd").string());
    write_landmarks(c.init_landmarks, (dir / "landmarks.csv").string());
    write_landmarks(c.validation_landmarks, (dir / "validation.csv").string());
    if (c.ground_truth) write_map(*c.ground_truth, (dir / "ground_truth.mhd").string());
    std::ofstream meta(dir / "case.txt");
    meta << "kind = " << kind << "\nseed = " << c.seed << "\n";
}

int cmd_perturb(const std::string& case_dir, const std::string& sigmas_csv, std::uint64_t seed,
                int repeats, const std::string& config_path, const std::string& out_path) {
    const fs::path dir(case_dir);
    const ScalarField target = read_volume((dir / "target.mhd").string());
    const ScalarField source = read_volume((dir / "source.mhd").string());
    const LandmarkSet init = read_landmarks((dir / "landmarks.csv").string());
    const LandmarkSet validation = read_landmarks((dir / "validation.csv").string());
    RunConfig config;
    if (!config_path.empty()) config = load_config(config_path);
    if (config.mode_is_field_path())
        throw DataError("perturb-study: field-valued alpha mode is not supported here");

    const std::vector<double> sigmas = parse_sigma_list(sigmas_csv);
    const auto curve =
        perturbation_study(target, source, init, validation, sigmas, seed, config.params, repeats);

    std::ofstream out(out_path);
    if (!out) throw DataError("perturb-study: cannot write " + out_path);
    out << "sigma_mm,mean_perturbation_mm,mean_tre_mm,failed_runs\n";
    for (const auto& pt : curve)
        out << format_double(pt.sigma) << "," << format_double(pt.mean_perturbation) << ","
            << format_double(pt.mean_tre) << "," << pt.failed_runs << "\n";
    std::cout << "perturbation curve written to " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"volume-conserving diffeomorphic registration"};
    app.require_subcommand(1);

    // register
    auto* reg = app.add_subcommand("register", "run the full registration pipeline");
    std::string reg_target, reg_source, reg_landmarks, reg_config, reg_validation, reg_mask,
        reg_out;
    reg->add_option("--target", reg_target, "target volume (.mhd)")->required();
    reg->add_option("--source", reg_source, "source volume (.mhd)")->required();
    reg->add_option("--landmarks", reg_landmarks, "init landmark pairs (.csv)")->required();
    reg->add_option("--config", reg_config, "run configuration (.json)");
    reg->add_option("--validation", reg_validation, "held-out validation landmarks (.csv)");
    reg->add_option("--mask", reg_mask, "binary mask to warp and volume-check (.mhd)");
    reg->add_option("--out", reg_out, "output directory")->required();

    // warp
    auto* warp = app.add_subcommand("warp", "apply a map to an image");
    std::string warp_image, warp_map, warp_out;
    bool warp_binary = false;
    double warp_threshold = 0.5;
    warp->add_option("--image", warp_image, "input volume (.mhd)")->required();
    warp->add_option("--map", warp_map, "map displacement field (.mhd)")->required();
    warp->add_option("--out", warp_out, "output volume (.mhd)")->required();
    warp->add_flag("--binary", warp_binary, "treat the image as a binary mask and re-threshold");
    warp->add_option("--threshold", warp_threshold, "mask threshold (default 0.5)");

    // jacobian
    auto* jac = app.add_subcommand("jacobian", "Jacobian determinant of a map");
    std::string jac_map, jac_out;
    jac->add_option("--map", jac_map, "map displacement field (.mhd)")->required();
    jac->add_option("--out", jac_out, "output determinant volume (.mhd)");

    // metrics
    auto* met = app.add_subcommand("metrics", "validation metrics for a map and masks");
    std::string met_map, met_landmarks, met_before, met_after, met_out;
    std::vector<std::string> met_dice;
    met->add_option("--map", met_map, "map displacement field (.mhd)");
    met->add_option("--landmarks", met_landmarks, "validation landmarks (.csv)");
    met->add_option("--mask-before", met_before, "mask before warping (.mhd)");
    met->add_option("--mask-after", met_after, "mask after warping (.mhd)");
    met->add_option("--dice", met_dice, "two masks to score")->expected(2);
    met->add_option("--out", met_out, "also write the metrics block to this file");

    // phantom
    auto* phantom = app.add_subcommand("phantom", "generate synthetic cases");
    phantom->require_subcommand(1);
    auto* ell = phantom->add_subcommand("ellipse", "2D ellipse pair");
    int ell_canvas = 256;
    double ell_spacing = 1.0, ell_area_src = 1888.0, ell_area_tgt = 1264.0, ell_sigma = 2.0;
    std::uint64_t ell_seed = 0;
    std::string ell_out;
    ell->add_option("--canvas", ell_canvas, "canvas size in px (default 256)");
    ell->add_option("--spacing", ell_spacing, "pixel spacing in mm (default 1)");
    ell->add_option("--area-src", ell_area_src, "source ellipse area, px");
    ell->add_option("--area-tgt", ell_area_tgt, "target ellipse area, px");
    ell->add_option("--edge-sigma", ell_sigma, "edge smoothing sigma, px (default 2)");
    ell->add_option("--seed", ell_seed, "seed (recorded; generation is deterministic)");
    ell->add_option("--out", ell_out, "output directory")->required();

    auto* blob = phantom->add_subcommand("blob3d", "3D blobs under a known divergence-free warp");
    int blob_size = 64, blob_n = 18, blob_lm = 10, blob_modes = 3;
    double blob_disp = 5.0, blob_spacing = 1.0;
    std::uint64_t blob_seed = 0;
    std::string blob_out;
    blob->add_option("--size", blob_size, "grid size per axis (default 64)");
    blob->add_option("--spacing", blob_spacing, "voxel spacing in mm (default 1)");
    blob->add_option("--blobs", blob_n, "number of blobs (default 18)");
    blob->add_option("--landmarks", blob_lm, "init landmarks; the rest become validation");
    blob->add_option("--modes", blob_modes, "band limit of the warp (default 3)");
    blob->add_option("--max-disp", blob_disp, "max displacement in voxels (default 5)");
    blob->add_option("--seed", blob_seed, "seed");
    blob->add_option("--out", blob_out, "output directory")->required();

    // perturb-study
    auto* pert = app.add_subcommand("perturb-study", "landmark-perturbation robustness curve");
    std::string pert_case, pert_sigmas = "0,0.5,1,2,3,5", pert_config, pert_out;
    std::uint64_t pert_seed = 0;
    int pert_repeats = 3;
    pert->add_option("--case", pert_case, "phantom case directory")->required();
    pert->add_option("--sigmas", pert_sigmas, "comma-separated sigma list, mm");
    pert->add_option("--seed", pert_seed, "base seed");
    pert->add_option("--repeats", pert_repeats, "noise draws per sigma (default 3)");
    pert->add_option("--config", pert_config, "run configuration (.json)");
    pert->add_option("--out", pert_out, "output curve (.csv)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (reg->parsed())
            return cmd_register(reg_target, reg_source, reg_landmarks, reg_config, reg_validation,
                                reg_mask, reg_out);
        if (warp->parsed())
            return cmd_warp(warp_image, warp_map, warp_out, warp_binary, warp_threshold);
        if (jac->parsed()) return cmd_jacobian(jac_map, jac_out);
        if (met->parsed())
            return cmd_metrics(met_map, met_landmarks, met_before, met_after, met_dice, met_out);
        if (ell->parsed()) {
            const Grid canvas(2, {ell_canvas, ell_canvas, 1},
                              Vec(ell_spacing, ell_spacing, 1.0));
            PhantomCase c = ellipse_pair(canvas, ell_area_src, ell_area_tgt, ell_sigma);
            c.seed = ell_seed;
            write_case_dir(c, ell_out, "ellipse");
            std::cout << "ellipse case written to " << ell_out << "\n";
            return kExitOk;
        }
        if (blob->parsed()) {
            const Grid grid(3, {blob_size, blob_size, blob_size},
                            Vec(blob_spacing, blob_spacing, blob_spacing));
            const InverseMap warp_map_gt =
                divfree_warp_3d(grid, blob_modes, blob_disp * blob_spacing, blob_seed);
            PhantomCase c = blob_case_3d(grid, blob_n, warp_map_gt, blob_lm, blob_seed);
            write_case_dir(c, blob_out, "blob3d");
            std::cout << "blob3d case written to " << blob_out << "\n";
            return kExitOk;
        }
        if (pert->parsed())
            return cmd_perturb(pert_case, pert_sigmas, pert_seed, pert_repeats, pert_config,
                               pert_out);
    } catch (const NumericalError& e) {
        std::cerr << "avocado: error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const DataError& e) {
        std::cerr << "avocado: error: " << e.what() << "\n";
        return kExitData;
    } catch (const Error& e) {
        std::cerr << "avocado: error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "avocado: error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}
