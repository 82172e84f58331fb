#include "revshare/settlement.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "revshare/error.hpp"
#include "text.hpp"

namespace revshare {

namespace {

constexpr const char* kModule = "settlement";
constexpr std::int64_t kBillion = 1'000'000'000;
__extension__ using Wide = __int128;

Cents threshold_cents(double threshold) {
    const double scaled = threshold * 100.0;
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > 1e-6)
        throw DomainError(kModule, fmt::format("breakpoint {} is not a whole number of cents", threshold));
    return static_cast<Cents>(rounded);
}

Cents checked_add(Cents a, Cents b) {
    Cents out = 0;
    if (__builtin_add_overflow(a, b, &out)) throw DomainError(kModule, "ledger total overflows 64-bit cents");
    return out;
}

void check_policy(const CommissionPolicy& policy) {
    if (auto d = policy.diagnostics(); !d.empty()) throw DomainError(kModule, d.front());
}

std::string join_periods(std::span<const Transaction> txs) {
    std::vector<std::string> seen;
    for (const auto& t : txs)
        if (std::find(seen.begin(), seen.end(), t.period) == seen.end()) seen.push_back(t.period);
    std::string out;
    for (std::size_t i = 0; i < seen.size(); ++i) out += (i ? "+" : "") + seen[i];
    return out;
}

// Transactions for which is_premium(i) is false are free tier: passed through uncommissioned.
template <typename Premium>
SettlementStatement settle_impl(std::span<const Transaction> txs, const CommissionPolicy& policy,
                                Premium&& is_premium) {
    check_policy(policy);
    SettlementStatement s;
    if (!txs.empty()) s.app_id = txs.front().app_id;
    s.period = join_periods(txs);

    Cents pooled = 0, ads = 0;
    for (std::size_t i = 0; i < txs.size(); ++i) {
        const auto& t = txs[i];
        if (t.app_id != s.app_id)
            throw DomainError(kModule, fmt::format("mixed app ids in one settlement ('{}' and '{}')", s.app_id,
                                                   t.app_id));
        if (t.gross < 0) throw DomainError(kModule, fmt::format("negative gross amount {} for '{}'", t.gross, t.app_id));
        s.gross_total = checked_add(s.gross_total, t.gross);
        auto& sub = s.per_kind_subtotals[static_cast<std::size_t>(t.kind)];
        sub = checked_add(sub, t.gross);
        if (!is_premium(i)) {
            ++s.free_tier_count;
            continue;
        }
        if (t.kind == TransactionKind::AdImpressionRevenue && !policy.pools_ad_revenue())
            ads = checked_add(ads, t.gross);
        else
            pooled = checked_add(pooled, t.gross);
    }
    s.platform_commission = period_commission(pooled, policy);
    if (policy.ad_share) s.platform_commission += apply_rate(ads, rate_in_ppb(*policy.ad_share));
    s.developer_payout = s.gross_total - s.platform_commission;
    s.effective_rate = s.gross_total > 0 ? static_cast<double>(s.platform_commission) / s.gross_total : 0.0;
    return s;
}

}  // namespace

const char* to_string(TransactionKind kind) {
    switch (kind) {
        case TransactionKind::Sale: return "Sale";
        case TransactionKind::SubscriptionCharge: return "SubscriptionCharge";
        case TransactionKind::AdImpressionRevenue: return "AdImpressionRevenue";
    }
    return "?";
}

TransactionKind parse_transaction_kind(std::string_view text) {
    std::string lower(detail::trim(text));
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "sale") return TransactionKind::Sale;
    if (lower == "subscription" || lower == "subscriptioncharge") return TransactionKind::SubscriptionCharge;
    if (lower == "ad" || lower == "adimpressionrevenue") return TransactionKind::AdImpressionRevenue;
    throw std::invalid_argument(fmt::format("unknown transaction kind '{}'", text));
}

std::int64_t rate_in_ppb(double rate) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw DomainError(kModule, fmt::format("rate out of [0,1] ({})", rate));
    const double scaled = rate * static_cast<double>(kBillion);
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > 1e-6)
        throw DomainError(kModule, fmt::format("rate {} has more than nine decimals", rate));
    return static_cast<std::int64_t>(rounded);
}

Cents apply_rate(Cents amount, std::int64_t ppb) {
    if (amount < 0) throw DomainError(kModule, "cannot apply a rate to a negative amount");
    const Wide numerator = static_cast<Wide>(amount) * ppb;
    return static_cast<Cents>((2 * numerator + kBillion) / (2 * static_cast<Wide>(kBillion)));
}

Cents period_commission(Cents gross, const CommissionPolicy& policy) {
    if (gross <= 0) return 0;
    // Accumulate band amount x ppb exactly, then round once.
    Wide numerator = 0;
    for (std::size_t j = 0; j < policy.bands.size(); ++j) {
        const Cents lo = threshold_cents(policy.bands[j].threshold);
        if (gross <= lo) break;
        const Cents hi = j + 1 < policy.bands.size() ? threshold_cents(policy.bands[j + 1].threshold) : gross;
        const Cents in_band = std::min(gross, hi) - lo;
        numerator += static_cast<Wide>(in_band) * rate_in_ppb(policy.bands[j].rate);
    }
    return static_cast<Cents>((2 * numerator + kBillion) / (2 * static_cast<Wide>(kBillion)));
}

SettlementStatement settle(std::span<const Transaction> transactions, const CommissionPolicy& policy) {
    return settle_impl(transactions, policy, [](std::size_t) { return true; });
}

SettlementStatement settle_freemium(std::span<const Transaction> transactions, const CommissionPolicy& policy,
                                    const std::vector<bool>& premium) {
    if (premium.size() != transactions.size())
        throw DomainError(kModule, fmt::format("premium flags ({}) do not match transactions ({})", premium.size(),
                                               transactions.size()));
    return settle_impl(transactions, policy, [&](std::size_t i) { return premium[i]; });
}

std::vector<SettlementStatement> settle_ledger(std::span<const Transaction> ledger, const CommissionPolicy& policy,
                                               bool freemium) {
    std::vector<std::pair<std::string, std::string>> keys;
    std::map<std::pair<std::string, std::string>, std::vector<Transaction>> groups;
    for (const auto& t : ledger) {
        auto key = std::make_pair(t.app_id, t.period);
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) keys.push_back(key);
        it->second.push_back(t);
    }
    std::vector<SettlementStatement> out;
    for (const auto& key : keys) {
        const auto& group = groups[key];
        if (freemium)
            out.push_back(settle_impl(std::span<const Transaction>(group), policy,
                                      [&](std::size_t i) { return group[i].premium; }));
        else
            out.push_back(settle(group, policy));
    }
    return out;
}

std::vector<Transaction> parse_ledger(std::istream& in, const std::string& source) {
    std::vector<Transaction> out;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    bool has_premium = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = detail::trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto fields = detail::split(line, ',');
        auto column_of = [&](std::size_t field) {
            std::size_t col = 1;
            for (std::size_t k = 0; k < field; ++k) col += fields[k].size() + 1;
            return col;
        };
        if (!header_seen) {
            header_seen = true;
            std::vector<std::string> names;
            for (auto f : fields) names.emplace_back(detail::trim(f));
            const std::vector<std::string> expected{"app_id", "period", "kind", "amount_cents"};
            has_premium = names.size() == 5 && names[4] == "premium";
            if (!(names.size() == 4 || has_premium) || !std::equal(expected.begin(), expected.end(), names.begin()))
                throw ParseError(source, line_no, 1, "expected header app_id,period,kind,amount_cents[,premium]");
            continue;
        }
        const std::size_t want = has_premium ? 5 : 4;
        if (fields.size() != want)
            throw ParseError(source, line_no, 0, fmt::format("expected {} fields, found {}", want, fields.size()));
        Transaction t;
        t.app_id = std::string(detail::trim(fields[0]));
        t.period = std::string(detail::trim(fields[1]));
        if (t.app_id.empty()) throw ParseError(source, line_no, column_of(0), "empty app_id");
        try {
            t.kind = parse_transaction_kind(fields[2]);
        } catch (const std::invalid_argument& e) {
            throw ParseError(source, line_no, column_of(2), e.what());
        }
        const auto amount = detail::parse_int(fields[3]);
        if (!amount) throw ParseError(source, line_no, column_of(3), "amount_cents must be an integer");
        if (*amount < 0) throw ParseError(source, line_no, column_of(3), "amount_cents must be non-negative");
        t.gross = *amount;
        if (has_premium) {
            const auto flag = detail::trim(fields[4]);
            if (flag == "1" || flag == "true" || flag == "premium")
                t.premium = true;
            else if (flag == "0" || flag == "false" || flag == "free")
                t.premium = false;
            else
                throw ParseError(source, line_no, column_of(4), "premium must be true/false");
        }
        out.push_back(std::move(t));
    }
    if (!header_seen) throw ParseError(source, line_no + 1, 0, "missing ledger header");
    return out;
}

std::string format_ledger(std::span<const Transaction> ledger) {
    std::string out = "app_id,period,kind,amount_cents,premium\n";
    for (const auto& t : ledger)
        out += fmt::format("{},{},{},{},{}\n", t.app_id, t.period, to_string(t.kind), t.gross,
                           t.premium ? "true" : "false");
    return out;
}

nlohmann::json to_json(const SettlementStatement& s) {
    nlohmann::json subtotals = nlohmann::json::object();
    for (std::size_t k = 0; k < kTransactionKinds; ++k)
        subtotals[to_string(static_cast<TransactionKind>(k))] = s.per_kind_subtotals[k];
    return {
        {"app_id", s.app_id},
        {"period", s.period},
        {"gross_total", s.gross_total},
        {"platform_commission", s.platform_commission},
        {"developer_payout", s.developer_payout},
        {"effective_rate", s.effective_rate},
        {"per_kind_subtotals", subtotals},
        {"free_tier_count", s.free_tier_count},
    };
}

SettlementStatement statement_from_json(const nlohmann::json& j) {
    SettlementStatement s;
    s.app_id = j.at("app_id").get<std::string>();
    s.period = j.at("period").get<std::string>();
    s.gross_total = j.at("gross_total").get<Cents>();
    s.platform_commission = j.at("platform_commission").get<Cents>();
    s.developer_payout = j.at("developer_payout").get<Cents>();
    s.effective_rate = j.at("effective_rate").get<double>();
    for (std::size_t k = 0; k < kTransactionKinds; ++k)
        s.per_kind_subtotals[k] = j.at("per_kind_subtotals").at(to_string(static_cast<TransactionKind>(k))).get<Cents>();
    s.free_tier_count = j.at("free_tier_count").get<std::int64_t>();
    if (s.platform_commission + s.developer_payout != s.gross_total)
        throw DomainError(kModule, "statement does not conserve gross (commission + payout != gross)");
    return s;
}

std::string statement_csv_header() {
    return "app_id,period,gross_total,platform_commission,developer_payout,effective_rate,"
           "sale_subtotal,subscription_subtotal,ad_subtotal,free_tier_count";
}

std::string to_csv_row(const SettlementStatement& s) {
    return fmt::format("{},{},{},{},{},{},{},{},{},{}", s.app_id, s.period, s.gross_total, s.platform_commission,
                       s.developer_payout, s.effective_rate, s.per_kind_subtotals[0], s.per_kind_subtotals[1],
                       s.per_kind_subtotals[2], s.free_tier_count);
}

std::string format_cents(Cents amount) {
    const bool negative = amount < 0;
    const std::uint64_t mag = negative ? -static_cast<std::uint64_t>(amount) : static_cast<std::uint64_t>(amount);
    return fmt::format("{}{}.{:02}", negative ? "-" : "", mag / 100, mag % 100);
}

}  // namespace revshare
