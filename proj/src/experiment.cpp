#include "gmcf/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gmcf/checkpoint.hpp"
#include "gmcf/config.hpp"
#include "gmcf/density.hpp"
#include "gmcf/parallel.hpp"
#include "gmcf/verify.hpp"

namespace fs = std::filesystem;

namespace gmcf {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void apply_threads(const Config& cfg, int threads_override) {
    int k = threads_override >= 0 ? threads_override : cfg.integer_or("solver.threads", 1);
    set_threads(k);
}

std::vector<std::string> resolved_header(const Config& cfg) {
    std::vector<std::string> h;
    for (const auto& [k, v] : cfg.entries) h.push_back(k + " = " + v);
    return h;
}

void write_series_header(std::ofstream& out, const std::vector<std::string>& header) {
    for (const std::string& h : header) out << "# " << h << "\n";
}

struct CheckpointWriter {
    std::string dir;
    int counter = 0;
    std::string next_path() {
        char buf[32];
        std::snprintf(buf, sizeof buf, "checkpoint_%06d.txt", counter++);
        return (fs::path(dir) / buf).string();
    }
};

int run_torus(const Config& cfg, const std::string& out_dir) {
    const int n = cfg.integer("grid.n");
    const int m = cfg.integer("grid.m");
    const int N = cfg.integer("grid.resolution");
    const std::string preset = cfg.get("initial.preset");
    const double t_end = cfg.num("solver.t_end");

    Config resolved = cfg;
    resolved.set("solver.sigma", fmt(cfg.num_or("solver.sigma", 0.9)));
    resolved.set("solver.output_every", fmt(cfg.num_or("solver.output_every", t_end / 50)));
    resolved.set("initial.amplitude", fmt(cfg.num_or("initial.amplitude", 0.05)));
    resolved.set("solver.threads", std::to_string(threads()));

    std::vector<int> winding;
    if (cfg.has("initial.winding")) {
        const auto w = cfg.list_or("initial.winding", {});
        if (static_cast<int>(w.size()) != n * m)
            throw ConfigError("initial.winding must have m*n entries");
        winding.resize(n * m);
        for (int i = 0; i < n * m; ++i) winding[i] = static_cast<int>(std::lround(w[i]));
    }
    auto fn = torus_preset(preset, n, m, cfg.num_or("initial.amplitude", 0.05),
                           cfg.num_or("initial.value", 0.25),
                           cfg.list_or("initial.coeffs", {}), winding);

    GridMap g = init_from_function(ManifoldSpec::torus(n, m),
                                   std::vector<int>(n, N), fn, winding);
    FlowState st{g, 0.0, 0.0, {}};

    CheckpointWriter ckpt{out_dir};
    RunOptions opt;
    opt.t_end = t_end;
    opt.sigma = cfg.num_or("solver.sigma", 0.9);
    opt.output_every = cfg.num_or("solver.output_every", t_end / 50);
    const double ck_every = cfg.num_or("solver.checkpoint_every", 0.0);
    if (ck_every > 0) {
        opt.snapshot_every = ck_every;
        opt.snapshot_cb = [&](const FlowState& s) { save_checkpoint(ckpt.next_path(), s); };
    }

    const RunResult res = run(st, opt);

    const auto header = resolved_header(resolved);
    std::ofstream ts(fs::path(out_dir) / "time_series.csv");
    write_series_header(ts, header);
    ts << "t,dt,min_star_omega,max_star_omega,max_det,max_energy_density,"
          "max_a2,max_h2,total_volume,max_velocity\n";
    for (const DiagnosticsRecord& r : res.series) {
        ts << fmt(r.t) << ',' << fmt(r.dt) << ',' << fmt(r.min_star_omega) << ','
           << fmt(r.max_star_omega) << ',' << fmt(r.max_det) << ','
           << fmt(r.max_energy_density) << ',' << fmt(r.max_a2) << ','
           << fmt(r.max_h2) << ',' << fmt(r.total_volume) << ','
           << fmt(r.max_velocity) << "\n";
    }
    save_checkpoint((fs::path(out_dir) / "checkpoint_final.txt").string(),
                    res.final_state);

    if (res.status == RunStatus::blew_up) {
        std::cerr << "blow-up detected at t=" << res.blowup_t << " grid index (";
        for (std::size_t i = 0; i < res.blowup_index.size(); ++i)
            std::cerr << (i ? "," : "") << res.blowup_index[i];
        std::cerr << ")\n";
        return 2;
    }
    return 0;
}

int run_sphere(const Config& cfg, const std::string& out_dir) {
    const int n = cfg.integer("grid.n");
    const int N = cfg.integer("grid.resolution");
    const std::string preset = cfg.get("initial.preset");
    const double t_end = cfg.num("solver.t_end");

    std::string boundary_kind;
    auto psi0 = sphere_preset(preset, cfg.num_or("initial.amplitude", 0.5), boundary_kind);
    boundary_kind = cfg.get_or("sphere.boundary", boundary_kind);
    const BoundaryKind boundary = boundary_kind == "degree_one"
                                      ? BoundaryKind::degree_one
                                      : BoundaryKind::null_homotopic;

    Config resolved = cfg;
    resolved.set("solver.sigma", fmt(cfg.num_or("solver.sigma", 0.9)));
    resolved.set("solver.output_every", fmt(cfg.num_or("solver.output_every", t_end / 50)));
    resolved.set("initial.amplitude", fmt(cfg.num_or("initial.amplitude", 0.5)));
    resolved.set("sphere.boundary", boundary_kind);
    resolved.set("solver.threads", std::to_string(threads()));

    ProfileState st = init_profile(n, N, boundary, psi0);

    CheckpointWriter ckpt{out_dir};
    ProfileRunOptions opt;
    opt.t_end = t_end;
    opt.sigma = cfg.num_or("solver.sigma", 0.9);
    opt.output_every = cfg.num_or("solver.output_every", t_end / 50);
    const double ck_every = cfg.num_or("solver.checkpoint_every", 0.0);
    if (ck_every > 0) {
        opt.snapshot_every = ck_every;
        opt.snapshot_cb = [&](const ProfileState& s) { save_checkpoint(ckpt.next_path(), s); };
    }

    const ProfileRunResult res = run_profile(st, opt);

    const auto header = resolved_header(resolved);
    std::ofstream ts(fs::path(out_dir) / "time_series.csv");
    write_series_header(ts, header);
    ts << "t,dt,min_star_omega,max_star_omega,max_det,max_energy_density,"
          "max_a2,max_h2,total_volume,max_velocity,max_lambda,max_abs_psi\n";
    for (const ProfileDiagnostics& r : res.series) {
        ts << fmt(r.base.t) << ',' << fmt(r.base.dt) << ',' << fmt(r.base.min_star_omega)
           << ',' << fmt(r.base.max_star_omega) << ',' << fmt(r.base.max_det) << ','
           << fmt(r.base.max_energy_density) << ',' << fmt(r.base.max_a2) << ','
           << fmt(r.base.max_h2) << ',' << fmt(r.base.total_volume) << ','
           << fmt(r.base.max_velocity) << ',' << fmt(r.max_lambda) << ','
           << fmt(r.max_abs_psi) << "\n";
    }
    save_checkpoint((fs::path(out_dir) / "checkpoint_final.txt").string(),
                    res.final_state);

    if (res.status == RunStatus::blew_up) {
        std::cerr << "blow-up detected at t=" << res.blowup_t << " node "
                  << res.blowup_index << "\n";
        return 2;
    }
    return 0;
}

}  // namespace

int cmd_run(const std::string& config_path, const std::string& out_dir,
            int threads_override) {
    try {
        const Config cfg = parse_config_file(config_path);
        apply_threads(cfg, threads_override);
        fs::create_directories(out_dir);
        const std::string kind = cfg.get("experiment.kind");
        if (kind == "torus") return run_torus(cfg, out_dir);
        if (kind == "sphere_equivariant") return run_sphere(cfg, out_dir);
        throw ConfigError("unknown experiment.kind: " + kind);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_verify(const std::string& config_path, const std::string& out_dir) {
    try {
        const Config cfg = config_path.empty() ? Config{} : parse_config_file(config_path);
        apply_threads(cfg, -1);
        fs::create_directories(out_dir);

        const int samples = cfg.integer_or("verify.samples", 10000);
        const std::uint64_t seed =
            static_cast<std::uint64_t>(cfg.integer_or("verify.seed", 20011230));
        const std::string mutation = cfg.get_or("verify.mutation", "none");
        if (mutation != "none" && mutation != "curvature_sign")
            throw ConfigError("unknown verify.mutation: " + mutation);
        std::string suites = cfg.get_or("verify.suites", "geometry,refinement");
        std::vector<int> levels;
        for (double v : cfg.list_or("verify.levels", {32, 64, 128}))
            levels.push_back(static_cast<int>(v));

        std::vector<VerifyCheck> checks;

        if (suites.find("geometry") != std::string::npos) {
            const SvdSuiteResult svd = svd_roundtrip_suite(samples, seed);
            checks.push_back(make_check("svd_reconstruction", "-", svd.max_reconstruction,
                                        "<=", 1e-12));
            checks.push_back(make_check("svd_diagonality", "-", svd.max_diagonality,
                                        "<=", 1e-12));
            checks.push_back(make_check("frame_relations", "-", svd.max_frame_error,
                                        "<=", 1e-12));
            checks.push_back(make_check("energy_identity", "-", svd.max_energy_error,
                                        "<=", 1e-12));
            checks.push_back(make_check("quadratic_bound", "-",
                                        quadratic_bound_suite(samples, seed + 1,
                                                              {0.1, 0.5, 0.9}),
                                        ">=", -1e-12));
            const double msign = mutation == "curvature_sign" ? -1.0 : 1.0;
            const CurvatureSuiteResult cur = curvature_sign_suite(samples, seed + 2, msign);
            checks.push_back(make_check("curvature_nonnegative", "-", cur.min_value,
                                        ">=", -1e-12));
            checks.push_back(make_check("curvature_strictly_positive", "-",
                                        cur.min_strict_value, ">=", 1e-15));
            checks.push_back(make_check("qform_margin", "-",
                                        qform_margin_suite(samples, seed + 3, 0.05),
                                        ">=", 1e-12));
        }

        if (suites.find("refinement") != std::string::npos) {
            const ResidualStudy study = residual_refinement_study(levels);
            for (std::size_t i = 0; i + 1 < study.levels.size(); ++i) {
                const double fe = study.evolution_residual[i] / study.evolution_residual[i + 1];
                const double fg = study.gradient_residual[i] / study.gradient_residual[i + 1];
                const std::string lvl = std::to_string(study.levels[i]) + "->" +
                                        std::to_string(study.levels[i + 1]);
                checks.push_back(make_check("evolution_residual_order", lvl,
                                            std::log2(fe), ">=", 1.8));
                checks.push_back(make_check("gradient_residual_order", lvl,
                                            std::log2(fg), ">=", 1.8));
            }
            for (std::size_t i = 0; i < study.levels.size(); ++i) {
                checks.push_back(make_check(
                    "evolution_residual", std::to_string(study.levels[i]),
                    study.evolution_residual[i], "<=", 1.0));
            }
        }

        Config resolved = cfg;
        resolved.set("verify.samples", std::to_string(samples));
        resolved.set("verify.seed", std::to_string(seed));
        resolved.set("verify.mutation", mutation);
        write_report((fs::path(out_dir) / "verify_report.txt").string(),
                     resolved_header(resolved), checks);

        bool all = true;
        for (const VerifyCheck& c : checks) {
            if (!c.pass)
                std::cerr << "verification failed: " << c.name << " level " << c.level
                          << " value " << c.value << "\n";
            all = all && c.pass;
        }
        return all ? 0 : 3;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

namespace {

bool wildcard_match(const std::string& pat, const std::string& s) {
    // '*' only; sufficient for checkpoint globs.
    std::size_t p = 0, i = 0, star = std::string::npos, mark = 0;
    while (i < s.size()) {
        if (p < pat.size() && (pat[p] == s[i])) {
            ++p;
            ++i;
        } else if (p < pat.size() && pat[p] == '*') {
            star = p++;
            mark = i;
        } else if (star != std::string::npos) {
            p = star + 1;
            i = ++mark;
        } else {
            return false;
        }
    }
    while (p < pat.size() && pat[p] == '*') ++p;
    return p == pat.size();
}

std::vector<std::string> expand_patterns(const std::vector<std::string>& pats) {
    std::vector<std::string> out;
    for (const std::string& pat : pats) {
        if (pat.find('*') == std::string::npos) {
            out.push_back(pat);
            continue;
        }
        const fs::path p(pat);
        const fs::path dir = p.parent_path().empty() ? "." : p.parent_path();
        const std::string leaf = p.filename().string();
        std::vector<std::string> found;
        if (fs::is_directory(dir))
            for (const auto& ent : fs::directory_iterator(dir))
                if (wildcard_match(leaf, ent.path().filename().string()))
                    found.push_back(ent.path().string());
        std::sort(found.begin(), found.end());
        out.insert(out.end(), found.begin(), found.end());
    }
    return out;
}

std::vector<double> parse_numbers(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

}  // namespace

int cmd_monitor(const MonitorArgs& args) {
    try {
        set_threads(args.threads_override >= 0 ? args.threads_override : 1);
        fs::create_directories(args.out_dir);
        const std::vector<std::string> paths = expand_patterns(args.checkpoints);
        if (paths.size() < 3) {
            std::cerr << "monitor: need at least 3 checkpoints (got " << paths.size()
                      << ")\n";
            return 1;
        }

        struct Slice {
            double t;
            PointCloud cloud;
        };
        std::vector<Slice> slices;
        for (const std::string& path : paths) {
            switch (checkpoint_kind(path)) {
                case CheckpointKind::torus: {
                    const FlowState st = load_torus_checkpoint(path);
                    slices.push_back({st.t, cloud_from_torus(st)});
                    break;
                }
                case CheckpointKind::sphere_equivariant: {
                    const ProfileState st = load_sphere_checkpoint(path);
                    slices.push_back({st.t, cloud_from_profile(st, 2 * st.num_nodes)});
                    break;
                }
                case CheckpointKind::cloud: {
                    PointCloud c = read_cloud_file(path);
                    slices.push_back({c.t, std::move(c)});
                    break;
                }
                default:
                    std::cerr << "monitor: unreadable checkpoint: " << path << "\n";
                    return 1;
            }
        }
        std::sort(slices.begin(), slices.end(),
                  [](const Slice& a, const Slice& b) { return a.t < b.t; });
        // Drop duplicate time slices (a final checkpoint often coincides
        // with the last periodic one).
        slices.erase(std::unique(slices.begin(), slices.end(),
                                 [](const Slice& a, const Slice& b) {
                                     return std::fabs(a.t - b.t) < 1e-15;
                                 }),
                     slices.end());
        if (slices.size() < 3) {
            std::cerr << "monitor: need at least 3 distinct checkpoint times\n";
            return 1;
        }
        for (const Slice& s : slices)
            if (s.t >= args.t0) {
                std::cerr << "monitor: checkpoint time " << s.t << " is not before t0="
                          << args.t0 << "\n";
                return 1;
            }

        // Resolve y0.
        std::vector<double> y0;
        std::string spec = args.y0_spec;
        bool graph_spec = false;
        if (spec.rfind("ambient:", 0) == 0) {
            spec = spec.substr(8);
        } else if (spec.rfind("graph:", 0) == 0) {
            spec = spec.substr(6);
            graph_spec = true;
        }
        const std::vector<double> nums = parse_numbers(spec);
        const PointCloud& last = slices.back().cloud;
        if (graph_spec) {
            // Embed a chart point of the final slice's graph.
            const std::string& path = paths.back();
            y0.assign(last.ambient_dim, 0.0);
            if (checkpoint_kind(path) == CheckpointKind::torus) {
                const FlowState st = load_torus_checkpoint(path);
                const int n = st.map.spec.n, m = st.map.spec.m;
                if (static_cast<int>(nums.size()) != n)
                    throw ConfigError("graph y0 needs n chart coordinates");
                GridIndexer ix(st.map.shape);
                std::vector<int> idx(n);
                std::vector<double> x(n);
                for (int a = 0; a < n; ++a) {
                    int k = static_cast<int>(std::lround(nums[a] * st.map.shape[a]));
                    idx[a] = ((k % st.map.shape[a]) + st.map.shape[a]) % st.map.shape[a];
                    x[a] = static_cast<double>(idx[a]) / st.map.shape[a];
                }
                const AmbientEmbedding emb = torus_embedding(st.map.spec);
                emb.evaluator(x.data(), st.map.values.data() + ix.flat(idx) * m, y0.data());
            } else if (checkpoint_kind(path) == CheckpointKind::sphere_equivariant) {
                const ProfileState st = load_sphere_checkpoint(path);
                const int n = st.n;
                if (static_cast<int>(nums.size()) != n)
                    throw ConfigError("graph y0 needs n chart coordinates");
                int k = static_cast<int>(nums[0] / st.dtheta());
                k = std::clamp(k, 0, st.num_nodes - 1);
                std::vector<double> x(n), fv(n);
                x[0] = st.theta(k);
                fv[0] = st.psi[k];
                for (int a = 1; a < n; ++a) x[a] = fv[a] = nums[a];
                const AmbientEmbedding emb =
                    sphere_product_embedding(ManifoldSpec::sphere(n));
                emb.evaluator(x.data(), fv.data(), y0.data());
            } else {
                throw ConfigError("graph y0 needs a flow checkpoint as the last input");
            }
        } else {
            y0 = nums;
            if (static_cast<int>(y0.size()) != last.ambient_dim)
                throw ConfigError("ambient y0 has wrong dimension");
        }

        DensityProbe probe{y0, args.t0, {}};
        for (const Slice& s : slices) gaussian_density(s.cloud, probe);

        const WhiteResult res = white_flag(probe, args.epsilon);
        std::vector<std::string> header;
        header.push_back("t0 = " + std::to_string(args.t0));
        header.push_back("epsilon = " + std::to_string(args.epsilon));
        std::string y0s = "y0 =";
        for (double c : y0) y0s += " " + std::to_string(c);
        header.push_back(y0s);
        write_probe_log((fs::path(args.out_dir) / "probe_log.csv").string(), header,
                        probe, args.epsilon);

        std::cout << (res.flag == WhiteFlag::regular ? "regular" : "suspicious")
                  << " (extrapolated density limit " << res.limit << ")\n";
        return res.flag == WhiteFlag::regular ? 0 : 4;
    } catch (const ConfigError& e) {
        std::cerr << "monitor error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "monitor error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "monitor error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace gmcf
