#pragma once

// Synthetic census-style file pairs with known true links, in the
// DS/IDENTIFIER/SURNAME/NAME/LASTCODE/NUMCODE/STREET layout. Linked records in
// B are copies of their A record, optionally corrupted with typographical
// errors; all other records are drawn independently.

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "elink/csv.hpp"
#include "elink/errors.hpp"

namespace elink::synthetic {

struct CensusOptions {
    std::size_t records_a = 449;
    std::size_t records_b = 392;
    std::size_t links = 327;
    double typo_rate = 0.15;     // per-field chance of a corruption in B's copy of a linked record
    double missing_rate = 0.01;  // per-field chance a value is left blank
    std::uint64_t seed = 20160101;
};

struct CensusFiles {
    std::vector<std::string> header{"DS", "IDENTIFIER", "SURNAME", "NAME", "LASTCODE", "NUMCODE", "STREET"};
    std::vector<std::vector<std::string>> rows_a;
    std::vector<std::vector<std::string>> rows_b;

    std::string csv(const std::vector<std::vector<std::string>>& rows) const {
        std::ostringstream out;
        out << csv::format_row(header) << '\n';
        for (const auto& r : rows) out << csv::format_row(r) << '\n';
        return out.str();
    }
    std::string csv_a() const { return csv(rows_a); }
    std::string csv_b() const { return csv(rows_b); }
};

namespace detail {

inline constexpr std::array<std::string_view, 120> kSurnames{
    "SMITH",     "JOHNSON",   "WILLIAMS", "BROWN",    "JONES",     "GARCIA",   "MILLER",   "DAVIS",
    "RODRIGUEZ", "MARTINEZ",  "HERNANDEZ","LOPEZ",    "GONZALEZ",  "WILSON",   "ANDERSON", "THOMAS",
    "TAYLOR",    "MOORE",     "JACKSON",  "MARTIN",   "LEE",       "PEREZ",    "THOMPSON", "WHITE",
    "HARRIS",    "SANCHEZ",   "CLARK",    "RAMIREZ",  "LEWIS",     "ROBINSON", "WALKER",   "YOUNG",
    "ALLEN",     "KING",      "WRIGHT",   "SCOTT",    "TORRES",    "NGUYEN",   "HILL",     "FLORES",
    "GREEN",     "ADAMS",     "NELSON",   "BAKER",    "HALL",      "RIVERA",   "CAMPBELL", "MITCHELL",
    "CARTER",    "ROBERTS",   "GOMEZ",    "PHILLIPS", "EVANS",     "TURNER",   "DIAZ",     "PARKER",
    "CRUZ",      "EDWARDS",   "COLLINS",  "REYES",    "STEWART",   "MORRIS",   "MORALES",  "MURPHY",
    "COOK",      "ROGERS",    "GUTIERREZ","ORTIZ",    "MORGAN",    "COOPER",   "PETERSON", "BAILEY",
    "REED",      "KELLY",     "HOWARD",   "RAMOS",    "KIM",       "COX",      "WARD",     "RICHARDSON",
    "WATSON",    "BROOKS",    "CHAVEZ",   "WOOD",     "JAMES",     "BENNETT",  "GRAY",     "MENDOZA",
    "RUIZ",      "HUGHES",    "PRICE",    "ALVAREZ",  "CASTILLO",  "SANDERS",  "PATEL",    "MYERS",
    "LONG",      "ROSS",      "FOSTER",   "JIMENEZ",  "POWELL",    "JENKINS",  "PERRY",    "RUSSELL",
    "SULLIVAN",  "BELL",      "COLEMAN",  "BUTLER",   "HENDERSON", "BARNES",   "GONZALES", "FISHER",
    "VASQUEZ",   "SIMMONS",   "ROMERO",   "JORDAN",   "PATTERSON", "ALEXANDER","HAMILTON", "GRAHAM"};

inline constexpr std::array<std::string_view, 96> kNames{
    "JAMES",    "MARY",     "ROBERT",  "PATRICIA", "JOHN",     "JENNIFER", "MICHAEL",  "LINDA",
    "DAVID",    "ELIZABETH","WILLIAM", "BARBARA",  "RICHARD",  "SUSAN",    "JOSEPH",   "JESSICA",
    "THOMAS",   "SARAH",    "CHARLES", "KAREN",    "CHRISTOPHER","LISA",   "DANIEL",   "NANCY",
    "MATTHEW",  "BETTY",    "ANTHONY", "MARGARET", "MARK",     "SANDRA",   "DONALD",   "ASHLEY",
    "STEVEN",   "KIMBERLY", "PAUL",    "EMILY",    "ANDREW",   "DONNA",    "JOSHUA",   "MICHELLE",
    "KENNETH",  "CAROL",    "KEVIN",   "AMANDA",   "BRIAN",    "DOROTHY",  "GEORGE",   "MELISSA",
    "TIMOTHY",  "DEBORAH",  "RONALD",  "STEPHANIE","EDWARD",   "REBECCA",  "JASON",    "SHARON",
    "JEFFREY",  "LAURA",    "RYAN",    "CYNTHIA",  "JACOB",    "KATHLEEN", "GARY",     "AMY",
    "NICHOLAS", "ANGELA",   "ERIC",    "SHIRLEY",  "JONATHAN", "ANNA",     "STEPHEN",  "BRENDA",
    "LARRY",    "PAMELA",   "JUSTIN",  "EMMA",     "SCOTT",    "NICOLE",   "BRANDON",  "HELEN",
    "BENJAMIN", "SAMANTHA", "SAMUEL",  "KATHERINE","GREGORY",  "CHRISTINE","ALEXANDER","DEBRA",
    "FRANK",    "RACHEL",   "PATRICK", "CAROLYN",  "RAYMOND",  "JANET",    "JACK",     "CATHERINE"};

inline constexpr std::array<std::string_view, 64> kStreets{
    "MAIN",      "OAK",       "PINE",      "MAPLE",     "CEDAR",     "ELM",       "WASHINGTON", "LAKE",
    "HILL",      "PARK",      "VIEW",      "WALNUT",    "SPRING",    "NORTH",     "RIDGE",      "CHURCH",
    "WILLOW",    "MILL",      "SUNSET",    "RAILROAD",  "JACKSON",   "CHERRY",    "HIGHLAND",   "FRANKLIN",
    "JEFFERSON", "MADISON",   "LINCOLN",   "MEADOW",    "FOREST",    "CENTER",    "VALLEY",     "BROADWAY",
    "ADAMS",     "DOGWOOD",   "HICKORY",   "LAUREL",    "MAGNOLIA",  "CHESTNUT",  "BIRCH",      "SYCAMORE",
    "RIVER",     "WOODLAND",  "HARRISON",  "PROSPECT",  "GRANT",     "MONROE",    "HOLLY",      "ORCHARD",
    "CLINTON",   "ACADEMY",   "COLLEGE",   "GARFIELD",  "EVERGREEN", "HAWTHORNE", "KINGSTON",   "LOCUST",
    "PLEASANT",  "SHERIDAN",  "SUMMIT",    "UNION",     "VINE",      "WESTERN",   "WINDSOR",    "BEACON"};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (true) {
            const std::uint64_t x = engine_();
            if (x >= threshold) return x % n;
        }
    }

    // Uniform in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return unit() < p; }

    // Skewed index: small indices are more common, like real name frequencies.
    std::size_t skewed(std::size_t n) {
        const double u = unit();
        return static_cast<std::size_t>(static_cast<double>(n) * u * u);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

inline char random_letter(Rng& rng) { return static_cast<char>('A' + rng.below(26)); }

inline std::string typo(std::string s, Rng& rng) {
    if (s.empty()) return s;
    switch (rng.below(4)) {
        case 0:  // substitute
            s[rng.below(s.size())] = random_letter(rng);
            break;
        case 1:  // delete
            if (s.size() > 2) s.erase(rng.below(s.size()), 1);
            break;
        case 2:  // insert
            s.insert(s.begin() + static_cast<std::ptrdiff_t>(rng.below(s.size() + 1)), random_letter(rng));
            break;
        default:  // transpose neighbours
            if (s.size() > 1) {
                const std::size_t i = rng.below(s.size() - 1);
                std::swap(s[i], s[i + 1]);
            }
            break;
    }
    return s;
}

struct Person {
    std::string surname, name, lastcode, numcode, street;
};

inline Person random_person(Rng& rng) {
    return {std::string(kSurnames[rng.skewed(kSurnames.size())]), std::string(kNames[rng.skewed(kNames.size())]),
            std::string(1, random_letter(rng)), std::to_string(1 + rng.below(999)),
            std::string(kStreets[rng.skewed(kStreets.size())])};
}

inline Person corrupt(Person p, double rate, Rng& rng) {
    if (rng.chance(rate)) p.surname = typo(p.surname, rng);
    if (rng.chance(rate)) p.name = typo(p.name, rng);
    if (rng.chance(rate / 2)) p.lastcode = std::string(1, random_letter(rng));
    if (rng.chance(rate / 2)) {
        const long n = std::stol(p.numcode);
        const long delta = 1 + static_cast<long>(rng.below(3));
        p.numcode = std::to_string(rng.chance(0.5) || n <= delta ? n + delta : n - delta);
    }
    if (rng.chance(rate)) p.street = typo(p.street, rng);
    return p;
}

inline std::vector<std::string> row(const std::string& ds, const std::string& id, const Person& p,
                                    double missing_rate, Rng& rng) {
    std::vector<std::string> out{ds, id, p.surname, p.name, p.lastcode, p.numcode, p.street};
    for (std::size_t k = 2; k < out.size(); ++k)
        if (rng.chance(missing_rate)) out[k].clear();
    return out;
}

}  // namespace detail

inline CensusFiles generate_census(const CensusOptions& options = {}) {
    if (options.links > options.records_a || options.links > options.records_b)
        throw UsageError("synthetic census: more links than records");
    if (!(options.typo_rate >= 0.0 && options.typo_rate <= 1.0) ||
        !(options.missing_rate >= 0.0 && options.missing_rate <= 1.0))
        throw UsageError("synthetic census: rates must lie in [0,1]");

    detail::Rng rng(options.seed);
    CensusFiles files;
    std::size_t next_id = 100000;
    auto fresh_id = [&] { return std::to_string(next_id++); };

    for (std::size_t k = 0; k < options.links; ++k) {
        const auto id = fresh_id();
        const auto person = detail::random_person(rng);
        files.rows_a.push_back(detail::row("A", id, person, options.missing_rate, rng));
        files.rows_b.push_back(
            detail::row("B", id, detail::corrupt(person, options.typo_rate, rng), options.missing_rate, rng));
    }
    for (std::size_t k = options.links; k < options.records_a; ++k)
        files.rows_a.push_back(detail::row("A", fresh_id(), detail::random_person(rng), options.missing_rate, rng));
    for (std::size_t k = options.links; k < options.records_b; ++k)
        files.rows_b.push_back(detail::row("B", fresh_id(), detail::random_person(rng), options.missing_rate, rng));

    rng.shuffle(files.rows_a);
    rng.shuffle(files.rows_b);
    return files;
}

}  // namespace elink::synthetic
