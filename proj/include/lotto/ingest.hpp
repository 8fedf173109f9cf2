#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lotto/dates.hpp"
#include "lotto/money.hpp"

namespace lotto {

enum class GameType { ScratchOff, Online };

std::string_view to_string(GameType t);
bool try_parse_game_type(std::string_view text, GameType& out);

/// One recorded prize claim. The dataset only contains prizes above $600,
/// so every row is a "big" win by construction.
struct ClaimRecord {
    std::string winner_id; // pseudonymized full-name key
    std::string city;
    std::string county;
    GameType game_type = GameType::ScratchOff;
    Cents prize_cents = 0;
    std::string lottery_name;
    std::string claim_center;
    Date paid_date;
    std::string retailer_name;
    std::string retailer_address;

    friend bool operator==(const ClaimRecord&, const ClaimRecord&) = default;
};

/// Total order over every field; used to store wins in a canonical order
/// so aggregation is insensitive to input row order.
bool claim_less(const ClaimRecord& a, const ClaimRecord& b);

/// Retailer identity after normalization. Name alone collides across chain
/// branches and address alone collides in multi-tenant buildings, so the
/// key is the pair.
struct StoreKey {
    std::string name;
    std::string address;

    auto operator<=>(const StoreKey&) const = default;
};

/// Lowercase, trim, collapse runs of whitespace, drop trailing punctuation.
std::string normalize_store_text(std::string_view raw);
StoreKey normalize_store(std::string_view raw_name, std::string_view raw_address);

struct RowError {
    std::size_t line = 0; // 1-based source line
    std::string reason;

    friend bool operator==(const RowError&, const RowError&) = default;
};

/// How claim columns map onto record fields, plus row-validation bounds.
struct SchemaConfig {
    char delimiter = ',';
    // field -> column header
    std::string col_winner = "winner";
    std::string col_city = "city";
    std::string col_county = "county";
    std::string col_game_type = "game_type";
    std::string col_prize = "prize_amount";
    std::string col_lottery = "lottery_game";
    std::string col_claim_center = "claim_center";
    std::string col_paid_date = "paid_date";
    std::string col_retailer_name = "retailer_name";
    std::string col_retailer_address = "retailer_address";

    Cents min_exclusive_prize_cents = 60000; // dataset records prizes > $600
    Date date_min{2006, 3, 31};
    Date date_max{2020, 1, 31};
};

struct ParseResult {
    std::vector<ClaimRecord> records;
    std::vector<RowError> errors;
};

/// Parse delimited claims. Rows that violate record invariants are
/// quarantined into `errors`; a missing column is fatal.
/// Throws SchemaError naming the first missing required column.
ParseResult parse_claims(std::istream& source, const SchemaConfig& schema = {});

enum class PlayerKeyMode {
    NameOnly, // aggregate on winner_id alone
    NameCity, // winner_id + city, for same-named winners in different cities
};

std::string player_key(const ClaimRecord& rec, PlayerKeyMode mode);

struct PlayerProfile {
    std::string player_id;
    std::vector<ClaimRecord> wins; // canonical order (claim_less)
    std::map<StoreKey, std::int64_t> store_counts;
    Cents total_cents = 0;

    std::int64_t win_count() const { return static_cast<std::int64_t>(wins.size()); }

    friend bool operator==(const PlayerProfile&, const PlayerProfile&) = default;
};

using ProfileMap = std::map<std::string, PlayerProfile>;

/// Group validated records into per-player profiles. Order-insensitive:
/// any permutation of `records` yields identical profiles.
ProfileMap aggregate_players(const std::vector<ClaimRecord>& records,
                             PlayerKeyMode mode = PlayerKeyMode::NameOnly);

/// Profiles interchange format: one structured record per line.
void write_profiles_jsonl(std::ostream& out, const ProfileMap& profiles);
ProfileMap read_profiles_jsonl(std::istream& in);

void write_errors_csv(std::ostream& out, const std::vector<RowError>& errors);

} // namespace lotto
