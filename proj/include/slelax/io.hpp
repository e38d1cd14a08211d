#pragma once

#include <string>
#include <vector>

#include "slelax/bpz.hpp"
#include "slelax/confluence.hpp"
#include "slelax/loewner.hpp"
#include "slelax/martingale.hpp"

namespace slelax {

// shortest round-trip decimal, locale-independent
std::string fmt_double(double v);

std::string trajectory_csv(const std::vector<LoewnerState>& states);

struct LedgerRow {
    double t = 0.0;
    DriftLedger ledger;
};
std::string ledger_csv(const std::vector<LedgerRow>& rows);

std::string confluence_csv(const ConfluenceRate& rate);
std::string bpz_csv(const ResidualLadder& ladder);
std::string mc_csv(const McResult& result);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
CsvTable parse_csv(const std::string& text); // throws UnknownColumn on malformed/empty input

// kinds: "trajectory" (traces vs t), "ledger" (log-scale residual vs t),
// "slope" (log-log scatter with least-squares fit line)
std::string plot_svg(const CsvTable& table, const std::string& kind);

} // namespace slelax
