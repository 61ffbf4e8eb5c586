#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "contrarian/cli.hpp"

namespace {

using namespace contrarian;
using contrarian::cli::RunConfig;

struct RawRunFlags {
    std::vector<std::string> inputs;
    std::string start;
    std::string end;
    std::string j = "1";
    std::string k = "1";
    int skip = 0;
    std::string groups = "10";
    std::string legs = "loser,winner,contrarian";
    std::string out = ".";
    std::string mode;
    bool drop_first_month = true;
    unsigned threads = 1;
};

void add_run_flags(CLI::App* cmd, RawRunFlags& f, bool with_mode) {
    cmd->add_option("--input", f.inputs, "Panel CSV (month,stock_id,return); repeatable")->required();
    cmd->add_option("--start", f.start, "First month YYYY-MM");
    cmd->add_option("--end", f.end, "Last month YYYY-MM");
    cmd->add_option("--j", f.j, "Estimation horizons, e.g. 1,6,12 or 3..48:3");
    cmd->add_option("--k", f.k, "Holding horizons, same syntax as --j");
    cmd->add_option("--skip", f.skip, "Months skipped between estimation and holding")->check(CLI::NonNegativeNumber);
    cmd->add_option("--groups", f.groups, "Group counts (>= 2), e.g. 3,5,10");
    cmd->add_option("--legs", f.legs, "Legs to report: loser,winner,contrarian");
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_flag("--drop-first-month,!--keep-first-month", f.drop_first_month,
                  "Mask each stock's first observation (default on)");
    cmd->add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber);
    if (with_mode)
        cmd->add_option("--mode", f.mode, "grouping-pairs or panel-pairs (default: by number of inputs)")
            ->check(CLI::IsMember({"grouping-pairs", "panel-pairs"}));
}

std::optional<MonthIndex> parse_month_flag(const std::string& text, const char* flag) {
    if (text.empty()) return std::nullopt;
    auto m = MonthIndex::parse(text);
    if (!m) throw Error(ErrorKind::invalid_argument, std::string(flag) + " expects YYYY-MM, got '" + text + "'");
    return m;
}

RunConfig to_config(const RawRunFlags& f, cli::CompareMode mode) {
    RunConfig c;
    c.inputs = f.inputs;
    c.start = parse_month_flag(f.start, "--start");
    c.end = parse_month_flag(f.end, "--end");
    c.J_set = parse_int_list(f.j);
    c.K_set = parse_int_list(f.k);
    c.skip = f.skip;
    c.G_set = parse_int_list(f.groups);
    c.legs.clear();
    for (const auto& name : split_fields(f.legs)) {
        auto leg = parse_leg(name);
        if (!leg) throw Error(ErrorKind::invalid_argument, "unknown leg '" + name + "'");
        if (std::find(c.legs.begin(), c.legs.end(), *leg) == c.legs.end()) c.legs.push_back(*leg);
    }
    c.out_dir = f.out;
    c.compare = mode;
    c.drop_first_month = f.drop_first_month;
    c.workers = f.threads;
    return c;
}

// Plain keys in a config file belong to whichever subcommand was invoked.
class SubcommandConfig : public CLI::ConfigBase {
public:
    explicit SubcommandConfig(const CLI::App* app) : app_(app) {}

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        auto items = CLI::ConfigBase::from_config(input);
        auto subs = app_->get_subcommands();
        if (subs.empty()) return items;
        for (auto& item : items)
            if (item.parents.empty()) item.parents.push_back(subs.front()->get_name());
        return items;
    }

private:
    const CLI::App* app_;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Loser / winner / contrarian J-K portfolio backtests on monthly return panels"};
    app.require_subcommand(1);
    app.fallthrough();
    app.allow_config_extras(false);

    RawRunFlags run_flags;
    RawRunFlags sweep_flags;
    RawRunFlags compare_flags;
    auto* run = app.add_subcommand("run", "Summary and per-cohort tables for every (J, K, G) cell");
    auto* sweep = app.add_subcommand("sweep", "J x K grids per leg for contour plotting");
    auto* compare = app.add_subcommand("compare", "Paired difference tests between groupings or panels");
    add_run_flags(run, run_flags, false);
    add_run_flags(sweep, sweep_flags, false);
    add_run_flags(compare, compare_flags, true);

    cli::SynthCommand synth_cmd;
    std::optional<std::uint64_t> missing_seed;
    auto* synth = app.add_subcommand("synth", "Write a seeded synthetic panel");
    synth->add_option("--stocks", synth_cmd.synth.n_stocks, "Number of stocks");
    synth->add_option("--months", synth_cmd.synth.n_months, "Number of months");
    synth->add_option("--phi", synth_cmd.synth.phi, "Idiosyncratic AR(1) coefficient in (-1, 1)");
    synth->add_option("--sigma-idio", synth_cmd.synth.sigma_idio, "Idiosyncratic monthly volatility");
    synth->add_option("--sigma-mkt", synth_cmd.synth.sigma_mkt, "Common-factor monthly volatility");
    synth->add_option("--mu", synth_cmd.synth.mu, "Common monthly drift");
    synth->add_option("--seed", synth_cmd.synth.seed, "64-bit seed");
    synth->add_option("--missing-rate", synth_cmd.missing_rate, "Probability of masking each cell");
    synth->add_option("--missing-seed", missing_seed, "Seed for the missing-cell mask (default: --seed)");
    synth->add_option("--out", synth_cmd.out_path, "Output CSV path (default: stdout)");
    app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");
    app.config_formatter(std::make_shared<SubcommandConfig>(&app));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::kExitOk : cli::kExitUsage;
    }

    try {
        if (*run) return cli::cmd_run(to_config(run_flags, cli::CompareMode::none), std::cerr);
        if (*sweep) return cli::cmd_sweep(to_config(sweep_flags, cli::CompareMode::none), std::cerr);
        if (*compare) {
            cli::CompareMode mode = compare_flags.inputs.size() == 2 ? cli::CompareMode::panel_pairs
                                                                     : cli::CompareMode::grouping_pairs;
            if (compare_flags.mode == "grouping-pairs") mode = cli::CompareMode::grouping_pairs;
            if (compare_flags.mode == "panel-pairs") mode = cli::CompareMode::panel_pairs;
            return cli::cmd_compare(to_config(compare_flags, mode), std::cerr);
        }
        if (*synth) {
            synth_cmd.missing_seed = missing_seed.value_or(synth_cmd.synth.seed);
            return cli::cmd_synth(synth_cmd, std::cout, std::cerr);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitUsage;
    }
    return cli::kExitUsage;
}
