// npsp: command-line front end for the plasticity experiments.
//
//   npsp compare   --map maps/dm1.map --map maps/dm2.map --trainer rs --trainer rw
//   npsp evolve    --map maps/dm1.map --map maps/dm2.map --generations 100
//   npsp heatmap   --map maps/dm1.map --rule best_novelty.rule
//   npsp trial     --map maps/dm1.map --trainer rw --sigma 0.1
//   npsp distfield --map maps/dm1.map
//
// Every subcommand also accepts --config <file> with `key = value` lines that
// mirror the long flags; flags given on the command line take precedence.

#include <npsp/npsp.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

namespace {

    std::string trim(std::string s)
    {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos)
            return {};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    /// Splices `key = value` lines from every --config file into the argument list,
    /// skipping keys that already appear as flags.
    std::vector<std::string> expand_config(std::vector<std::string> args)
    {
        std::vector<std::string> out;
        std::vector<std::string> files;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size())
                files.push_back(args[++i]);
            else if (args[i].rfind("--config=", 0) == 0)
                files.push_back(args[i].substr(9));
            else
                out.push_back(args[i]);
        }
        std::set<std::string> given;
        for (const auto& a : out)
            if (a.rfind("--", 0) == 0)
                given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));

        for (const auto& path : files) {
            std::ifstream in(path);
            if (!in)
                throw npsp::ParseError("cannot open config file '" + path + "'");
            std::string line;
            int lineno = 0;
            while (std::getline(in, line)) {
                ++lineno;
                line = trim(line.substr(0, line.find('#')));
                if (line.empty())
                    continue;
                const auto eq = line.find('=');
                if (eq == std::string::npos)
                    throw npsp::ParseError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
                const auto key = trim(line.substr(0, eq));
                const auto value = trim(line.substr(eq + 1));
                if (given.count(key))
                    continue;
                if (value == "true")
                    out.push_back("--" + key);
                else if (value != "false") {
                    out.push_back("--" + key);
                    out.push_back(value);
                }
            }
        }
        return out;
    }

    void add_common(CLI::App* cmd, npsp::harness::CommonOptions& o, bool multi_trainer, bool multi_hidden)
    {
        cmd->add_option("--map", o.maps, "Map file (repeatable)")->required();
        if (multi_hidden)
            cmd->add_option("--hidden", o.hidden, "Hidden-layer size(s): 0, 15, 30, 50")->capture_default_str();
        else
            cmd->add_option("--hidden", o.hidden, "Hidden-layer size: 0, 15, 30, 50")->expected(1)->capture_default_str();
        cmd->add_option("--episodes", o.episodes, "Episodes per trial")->capture_default_str();
        cmd->add_option("--steps", o.steps, "Action steps per episode")->capture_default_str();
        cmd->add_option("--trials", o.trials, "Trials (per start, per cell or per run, by command)")->capture_default_str();
        cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
        auto* trainer = cmd->add_option("--trainer", o.trainers, "Trainer: rs, rw or npsp")->check(CLI::IsMember({"rs", "rw", "npsp"}));
        if (!multi_trainer)
            trainer->expected(1);
        cmd->add_option("--sigma", o.sigma, "Random-walk perturbation standard deviation")->capture_default_str();
        cmd->add_option("--rule", o.rule_path, "NPSP rule file");
        cmd->add_option("--alpha-h", o.alpha_h, "Recurrent scale for RS/RW (NPSP rules carry their own)")->capture_default_str();
        cmd->add_option("--alpha-o", o.alpha_o, "Feedback scale for RS/RW (NPSP rules carry their own)")->capture_default_str();
        cmd->add_option("--workers", o.workers, "Worker threads; results do not depend on it")->capture_default_str();
        cmd->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
    }

} // namespace

int main(int argc, char** argv)
{
    using namespace npsp::harness;

    CLI::App app{"Novelty-producing synaptic plasticity experiments on deceptive grid mazes"};
    app.require_subcommand(1);

    CompareOptions compare;
    auto* c = app.add_subcommand("compare", "Run RS / RW / NPSP trial matrices and report medians");
    add_common(c, compare, true, true);
    c->add_option("--starts", compare.starts, "Start positions per map")->capture_default_str();
    c->add_flag("--per-env", compare.per_env, "Report maps separately, --trials trials per map");

    EvolveOptions evolve;
    auto* e = app.add_subcommand("evolve", "Evolve NPSP rules with the genetic algorithm");
    add_common(e, evolve, false, false);
    e->add_option("--starts", evolve.starts, "Start positions per map")->capture_default_str();
    e->add_option("--runs", evolve.runs, "Independent GA runs; best by training novelty is kept")->capture_default_str();
    e->add_option("--pop", evolve.ga.pop_size, "Population size")->capture_default_str();
    e->add_option("--elite", evolve.ga.elite, "Elite count")->capture_default_str();
    e->add_option("--generations", evolve.ga.generations, "Generations")->capture_default_str();
    e->add_option("--crossover-p", evolve.ga.crossover_p, "One-point crossover probability")->capture_default_str();
    e->add_option("--mutation-p", evolve.ga.discrete_mutation_p, "Discrete gene resample probability")->capture_default_str();
    e->add_option("--mutation-sd", evolve.ga.continuous_mutation_sd, "Continuous gene perturbation sd")->capture_default_str();
    e->add_flag("--reevaluate-elites", evolve.ga.reevaluate_elites, "Re-score elites each generation");
    bool quiet = false;
    e->add_flag("--quiet", quiet, "No per-generation progress");

    HeatmapOptions heatmap;
    auto* h = app.add_subcommand("heatmap", "Per-start-cell medians over the first room");
    add_common(h, heatmap, false, false);

    TrialOptions trial;
    auto* t = app.add_subcommand("trial", "Run trials from one start and log every episode");
    add_common(t, trial, false, false);
    t->add_option("--start", trial.start, "1-based start position")->capture_default_str();
    t->add_flag("--dump-weights", trial.dump_weights, "Write final weight snapshots");

    DistfieldOptions dist;
    auto* d = app.add_subcommand("distfield", "Export goal-distance fields as CSV and PGM");
    d->add_option("--map", dist.maps, "Map file (repeatable)")->required();
    d->add_option("--out", dist.out_dir, "Output directory")->capture_default_str();

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config(std::move(args));
        std::vector<char*> cargv{argv[0]};
        for (auto& a : args)
            cargv.push_back(a.data());
        try {
            app.parse(static_cast<int>(cargv.size()), cargv.data());
        }
        catch (const CLI::ParseError& err) {
            return app.exit(err);
        }

        if (c->parsed()) {
            auto report = cmd_compare(compare);
            std::cout << report.rows_csv();
        }
        else if (e->parsed()) {
            auto res = cmd_evolve(evolve, [&](int run, const npsp::GenerationRecord& r) {
                if (!quiet)
                    std::cerr << (evolve.runs > 1 ? "run " + std::to_string(run) + "  " : std::string()) << "generation " << r.generation
                              << "  best novelty " << npsp::io::fixed(r.best_novelty_score) << "  best distance " << npsp::io::fixed(r.best_distance_score)
                              << "\n";
            });
            if (evolve.runs > 1)
                std::cout << "selected run " << res.best_novelty_run << "\n";
            std::cout << "best novelty " << npsp::io::fixed(res.best_novelty_score) << ", rule:\n" << npsp::io::format_rule(npsp::to_rule(res.best_novelty));
        }
        else if (h->parsed()) {
            for (const auto& g : cmd_heatmap(heatmap))
                std::cout << g.map_name << ": " << g.cells_below_one << " of " << g.cells << " start cells with median distance < 1\n";
        }
        else if (t->parsed()) {
            for (const auto& r : cmd_trial(trial))
                std::cout << "seed " << r.seed << ": novelty " << npsp::io::fixed(r.novelty) << ", distance " << npsp::io::fixed(r.dist_agent)
                          << ", episodes " << r.episodes.size() << (r.reached_goal ? ", goal reached" : "") << "\n";
        }
        else if (d->parsed()) {
            for (const auto& f : cmd_distfield(dist))
                std::cout << "door " << f.door_distance << ", max " << f.max_dist << ", max goal room " << f.max_dist_second_room << "\n";
        }
    }
    catch (const npsp::ParseError& err) {
        std::cerr << "parse error: " << err.what() << "\n";
        return 2;
    }
    catch (const npsp::ValidationError& err) {
        std::cerr << "invalid input: " << err.what() << "\n";
        return 2;
    }
    catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
