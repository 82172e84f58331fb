#pragma once

// Exact revenue split between platform and developer. All amounts are integer
// cents; rates are applied as exact parts-per-billion and the commission is
// rounded half-up once per period aggregate, leaving the remainder to the
// developer.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "revshare/model.hpp"

namespace revshare {

using Cents = std::int64_t;

enum class TransactionKind { Sale, SubscriptionCharge, AdImpressionRevenue };
inline constexpr std::size_t kTransactionKinds = 3;

const char* to_string(TransactionKind kind);
TransactionKind parse_transaction_kind(std::string_view text);

struct Transaction {
    std::string app_id;
    Cents gross = 0;
    TransactionKind kind = TransactionKind::Sale;
    std::string period;
    bool premium = true;  // consulted only by settle_freemium

    bool operator==(const Transaction&) const = default;
};

struct SettlementStatement {
    std::string app_id;
    std::string period;
    Cents gross_total = 0;
    Cents platform_commission = 0;
    Cents developer_payout = 0;
    double effective_rate = 0.0;  // commission / gross, 0 for an empty period
    std::array<Cents, kTransactionKinds> per_kind_subtotals{};
    std::int64_t free_tier_count = 0;

    Cents subtotal(TransactionKind kind) const { return per_kind_subtotals[static_cast<std::size_t>(kind)]; }

    bool operator==(const SettlementStatement&) const = default;
};

/// Rate as an exact integer number of parts per billion. Throws DomainError
/// when the rate is outside [0, 1] or has more than nine decimals.
std::int64_t rate_in_ppb(double rate);

/// round_half_up(amount * ppb / 1e9) computed exactly.
Cents apply_rate(Cents amount, std::int64_t ppb);

/// Commission on one period aggregate under `policy`'s bands. Degressive
/// thresholds are read as currency units and must be whole cents.
Cents period_commission(Cents gross, const CommissionPolicy& policy);

/// Settles one app's transactions as a single period. Advertising revenue
/// uses the policy's ad share when set and is pooled with the rest otherwise.
SettlementStatement settle(std::span<const Transaction> transactions, const CommissionPolicy& policy);

/// Freemium variant: only transactions with premium[i] set are commissioned;
/// free-tier transactions pass through and are counted in free_tier_count.
SettlementStatement settle_freemium(std::span<const Transaction> transactions, const CommissionPolicy& policy,
                                    const std::vector<bool>& premium);

/// Groups a ledger by (app, period) in first-appearance order and settles each
/// group; uses settle_freemium when `freemium` is set (premium flag taken from
/// each transaction).
std::vector<SettlementStatement> settle_ledger(std::span<const Transaction> ledger, const CommissionPolicy& policy,
                                               bool freemium = false);

/// Ledger text: header "app_id,period,kind,amount_cents[,premium]" then one
/// transaction per line. Blank lines and '#' comments are skipped.
std::vector<Transaction> parse_ledger(std::istream& in, const std::string& source = "<ledger>");
std::string format_ledger(std::span<const Transaction> ledger);

nlohmann::json to_json(const SettlementStatement& s);
SettlementStatement statement_from_json(const nlohmann::json& j);

std::string statement_csv_header();
std::string to_csv_row(const SettlementStatement& s);

/// "1234.56" / "-0.05".
std::string format_cents(Cents amount);

}  // namespace revshare
