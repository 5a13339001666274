#include <atomic>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "chorea/io.hpp"

// chorea: find symmetric periodic orbits of the equal-mass spatial N-body
// problem by action minimization in a uniformly rotating frame.
//
//   chorea solve  --n 3 --sym dn --xi "+-" --omega 0 --out run/
//   chorea sweep  --n 3 --sym dn --xi "+-" --grid 0:3:21 --out fam/
//   chorea verify trajectory.csv --omega 0

namespace {

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    const auto c1 = text.find(':');
    if (c1 != std::string::npos) {
        const auto c2 = text.find(':', c1 + 1);
        if (c2 == std::string::npos) throw chorea::ConfigError("grid: expected from:to:count");
        const double a = std::stod(text.substr(0, c1));
        const double b = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        const int count = std::stoi(text.substr(c2 + 1));
        if (count < 2) throw chorea::ConfigError("grid: need at least 2 points");
        for (int i = 0; i < count; ++i) grid.push_back(a + (b - a) * i / (count - 1));
        return grid;
    }
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) grid.push_back(std::stod(tok));
    return grid;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symmetric periodic orbits of the equal-mass spatial N-body problem"};
    app.require_subcommand(1);

    chorea::RunConfig cfg;
    std::string config_path, grid_text, xi_text, sym_text, out_text;
    int n_opt = 0, order_opt = 0, gridpts_opt = 0, jobs_opt = 0;
    double omega_opt = 0.0, amp_opt = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file; flags override its fields");
        sub->add_option("--n", n_opt, "number of bodies");
        sub->add_option("--sym", sym_text, "symmetry class: dn | hn");
        sub->add_option("--xi", xi_text, "topological class, e.g. \"+-\" or \"1,-1\"");
        sub->add_option("--fourier-order", order_opt, "Fourier truncation order F");
        sub->add_option("--grid-points", gridpts_opt, "time grid size M (multiple of 2N)");
        sub->add_option("--seed-amplitude", amp_opt, "initial guess amplitude");
        sub->add_option("--out", out_text, "output directory");
        sub->add_option("--jobs", jobs_opt, "parallel families (sweep with repeated --xi)");
    };

    CLI::App* solve = app.add_subcommand("solve", "minimize at a single frequency");
    add_common(solve);
    solve->add_option("--omega", omega_opt, "frame angular velocity");

    CLI::App* sweepc = app.add_subcommand("sweep", "continuation sweep over frequencies");
    add_common(sweepc);
    sweepc->add_option("--grid", grid_text, "frequencies: from:to:count or comma list");
    std::vector<std::string> xi_list;
    sweepc->add_option("--xi-list", xi_list, "additional classes swept in parallel");

    CLI::App* verify = app.add_subcommand("verify", "diagnostics for a trajectory CSV");
    std::string verify_csv;
    double verify_omega = 0.0;
    verify->add_option("csv", verify_csv, "trajectory file")->required();
    verify->add_option("--omega", verify_omega, "frame angular velocity of the data");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw chorea::ConfigError("cannot open config " + config_path);
            chorea::json j;
            f >> j;
            chorea::config_from_json(cfg, j);
        }
        auto over = [&](CLI::App* sub) {
            if (sub->count("--n")) cfg.n = n_opt;
            if (sub->count("--sym")) cfg.sym = sym_text;
            if (sub->count("--xi")) cfg.xi = xi_text;
            if (sub->count("--fourier-order")) cfg.fourier_order = order_opt;
            if (sub->count("--grid-points")) cfg.grid_points = gridpts_opt;
            if (sub->count("--seed-amplitude")) cfg.seed_amplitude = amp_opt;
            if (sub->count("--out")) cfg.out_dir = out_text;
            if (sub->count("--jobs")) cfg.jobs = jobs_opt;
        };

        if (solve->parsed()) {
            over(solve);
            if (solve->count("--omega")) cfg.omega = omega_opt;
            return chorea::cmd_solve(cfg);
        }
        if (sweepc->parsed()) {
            over(sweepc);
            if (sweepc->count("--grid")) {
                cfg.grid = parse_grid(grid_text);
                cfg.has_grid = true;
            }
            if (!cfg.has_grid) throw chorea::ConfigError("sweep: --grid is required");
            if (xi_list.empty()) return chorea::cmd_sweep(cfg);
            // independent families in a small thread pool, one subdirectory each
            std::vector<chorea::RunConfig> fams;
            fams.push_back(cfg);
            for (const auto& x : xi_list) {
                chorea::RunConfig c = cfg;
                c.xi = x;
                fams.push_back(c);
            }
            for (auto& c : fams) c.out_dir = c.out_dir + "/xi_" + c.xi;
            std::vector<int> rcs(fams.size(), 0);
            std::vector<std::thread> pool;
            std::atomic<size_t> next{0};
            const int jobs = std::max(1, cfg.jobs);
            for (int t = 0; t < jobs; ++t)
                pool.emplace_back([&] {
                    for (size_t i = next.fetch_add(1); i < fams.size(); i = next.fetch_add(1))
                        rcs[i] = chorea::cmd_sweep(fams[i]);
                });
            for (auto& th : pool) th.join();
            for (int rc : rcs)
                if (rc) return rc;
            return 0;
        }
        if (verify->parsed()) {
            return chorea::cmd_verify(verify_csv, verify_omega, std::cout);
        }
    } catch (const chorea::InfeasiblePattern& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
