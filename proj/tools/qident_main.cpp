#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "qident/campaign.hpp"

using namespace qident;

namespace {

int cmd_list() {
    std::cout << "identities:\n";
    for (const auto& e : identity_registry()) {
        const char* root = e.root == RootSystem::OneDim ? "1d "
                           : e.root == RootSystem::A    ? "A_r"
                           : e.root == RootSystem::C    ? "C_r"
                                                        : "D_r";
        std::cout << "  " << e.id << "  [" << root << (e.bilateral ? ", bilateral" : ", terminating")
                  << (e.expected == ExpectedBehavior::DivergentForRGe2 ? ", divergent for r>=2" : "")
                  << "]  " << e.summary << "\n";
    }
    std::cout << "matrix pairs:\n";
    for (const auto& id : inverse_pair_ids())
        std::cout << "  " << id << (pair_two_sided(id) ? "  [two-sided inverse]" : "") << "\n";
    std::cout << "  crmi_printed  [displayed form; left-inverse only, right sum is not delta for r>=2]\n";
    return 0;
}

void print_case(const CaseResult& c) {
    std::cout << c.kind << " " << c.id;
    if (!c.side.empty()) std::cout << " " << c.side;
    std::cout << " r=" << c.r << " sample=" << c.sample_index << " -> " << c.status;
    if (!c.residual.empty()) std::cout << " residual=" << c.residual;
    if (!c.note.empty()) std::cout << " (" << c.note << ")";
    std::cout << "\n";
}

int finish(const CampaignConfig& cfg, const Report& rep) {
    for (const auto& c : rep.cases) print_case(c);
    write_report(cfg, rep);
    std::cout << "summary: pass=" << rep.pass << " fail=" << rep.fail
              << " divergent=" << rep.divergent << " inconclusive=" << rep.inconclusive
              << " expectations_met=" << (rep.expectations_met ? "yes" : "no") << "\n";
    std::cout << "report written to " << cfg.report_path << "\n";
    return rep.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numeric verification of multilateral matrix inverses and basic "
                 "hypergeometric summations over Z^r"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "list identity and matrix-pair ids");

    std::string id, mode = "float", out_path = "report.json", side = "left", pair;
    int r = 1, samples = 5;
    std::uint64_t seed = 1;
    unsigned digits = 50;
    double tol = 1e-15;
    long max_shell = 240, window = 1;

    auto* verify = app.add_subcommand("verify", "verify one identity on sampled parameters");
    verify->add_option("--id", id, "identity id (see `list`)")->required();
    verify->add_option("--r", r, "rank");
    verify->add_option("--samples", samples, "number of seeded samples");
    verify->add_option("--seed", seed, "base seed");
    verify->add_option("--mode", mode, "rational | float");
    verify->add_option("--digits", digits, "BigFloat decimal digits");
    verify->add_option("--tol", tol, "campaign tolerance");
    verify->add_option("--max-shell", max_shell, "bilateral shell budget");
    verify->add_option("--out", out_path, "report path");

    auto* ortho = app.add_subcommand("ortho", "orthogonality scan of a matrix pair");
    ortho->add_option("--pair", pair, "pair id (bmi, armi, arvmi, crmi, crmi_printed)")->required();
    ortho->add_option("--side", side, "left | right");
    ortho->add_option("--window", window, "window radius");
    ortho->add_option("--r", r, "rank");
    ortho->add_option("--samples", samples, "number of seeded samples");
    ortho->add_option("--seed", seed, "base seed");
    ortho->add_option("--digits", digits, "BigFloat decimal digits");
    ortho->add_option("--tol", tol, "campaign tolerance");
    ortho->add_option("--out", out_path, "report path");

    std::string config_path;
    auto* campaign = app.add_subcommand("campaign", "run a configured campaign");
    campaign->add_option("--config", config_path, "JSON config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) return cmd_list();

        if (verify->parsed()) {
            CampaignConfig cfg;
            cfg.identities = {id};
            cfg.pairs = {};
            cfg.r_values = {r};
            cfg.samples = samples;
            cfg.seed = seed;
            cfg.rational_mode = mode == "rational";
            cfg.digits = digits;
            cfg.campaign_tol = tol;
            cfg.policy.shell_tol = tol / 10.0;
            cfg.policy.max_shell = max_shell;
            cfg.report_path = out_path;
            identity_info(id);  // validates the id
            return finish(cfg, run_campaign(cfg));
        }

        if (ortho->parsed()) {
            CampaignConfig cfg;
            cfg.identities = {};
            cfg.pairs = {pair};
            cfg.r_values = {r};
            cfg.samples = samples;
            cfg.seed = seed;
            cfg.digits = digits;
            cfg.campaign_tol = tol;
            cfg.ortho.left = side == "left";
            cfg.ortho.right = side == "right";
            cfg.ortho.window_r1 = cfg.ortho.window_r2 = window;
            cfg.report_path = out_path;
            return finish(cfg, run_campaign(cfg));
        }

        if (campaign->parsed()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "cannot open config: " << config_path << "\n";
                return 2;
            }
            Json j = Json::parse(in, nullptr, true, true);
            CampaignConfig cfg = parse_config(j);
            return finish(cfg, run_campaign(cfg));
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const Json::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
