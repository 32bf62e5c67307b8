#pragma once

// Built-in US gazetteer tables: state names, USPS codes and large cities.

#include <array>
#include <string_view>

namespace stancetopic::geo_data {

struct NamedPlace {
  std::string_view name;
  std::string_view state;
};

inline constexpr std::array<NamedPlace, 51> kStates{{
    {"alabama", "AL"},        {"alaska", "AK"},         {"arizona", "AZ"},        {"arkansas", "AR"},
    {"california", "CA"},     {"colorado", "CO"},       {"connecticut", "CT"},    {"delaware", "DE"},
    {"district of columbia", "DC"}, {"florida", "FL"},  {"georgia", "GA"},        {"hawaii", "HI"},
    {"idaho", "ID"},          {"illinois", "IL"},       {"indiana", "IN"},        {"iowa", "IA"},
    {"kansas", "KS"},         {"kentucky", "KY"},       {"louisiana", "LA"},      {"maine", "ME"},
    {"maryland", "MD"},       {"massachusetts", "MA"},  {"michigan", "MI"},       {"minnesota", "MN"},
    {"mississippi", "MS"},    {"missouri", "MO"},       {"montana", "MT"},        {"nebraska", "NE"},
    {"nevada", "NV"},         {"new hampshire", "NH"},  {"new jersey", "NJ"},     {"new mexico", "NM"},
    {"new york", "NY"},       {"north carolina", "NC"}, {"north dakota", "ND"},   {"ohio", "OH"},
    {"oklahoma", "OK"},       {"oregon", "OR"},         {"pennsylvania", "PA"},   {"rhode island", "RI"},
    {"south carolina", "SC"}, {"south dakota", "SD"},   {"tennessee", "TN"},      {"texas", "TX"},
    {"utah", "UT"},           {"vermont", "VT"},        {"virginia", "VA"},       {"washington", "WA"},
    {"west virginia", "WV"},  {"wisconsin", "WI"},      {"wyoming", "WY"},
}};

// Large US cities (roughly the 300 most populous plus state capitals). Names
// that occur in several states are listed once per state; the gazetteer marks
// them ambiguous automatically.
inline constexpr NamedPlace kCities[] = {
    {"new york", "NY"}, {"new york city", "NY"}, {"nyc", "NY"}, {"los angeles", "CA"}, {"chicago", "IL"},
    {"houston", "TX"}, {"philadelphia", "PA"}, {"phoenix", "AZ"}, {"san antonio", "TX"}, {"san diego", "CA"},
    {"dallas", "TX"}, {"san jose", "CA"}, {"austin", "TX"}, {"jacksonville", "FL"}, {"indianapolis", "IN"},
    {"san francisco", "CA"}, {"columbus", "OH"}, {"fort worth", "TX"}, {"charlotte", "NC"}, {"detroit", "MI"},
    {"el paso", "TX"}, {"memphis", "TN"}, {"boston", "MA"}, {"seattle", "WA"}, {"denver", "CO"},
    {"washington dc", "DC"}, {"nashville", "TN"}, {"baltimore", "MD"}, {"louisville", "KY"}, {"portland", "OR"},
    {"oklahoma city", "OK"}, {"milwaukee", "WI"}, {"las vegas", "NV"}, {"albuquerque", "NM"}, {"tucson", "AZ"},
    {"fresno", "CA"}, {"sacramento", "CA"}, {"long beach", "CA"}, {"kansas city", "MO"}, {"mesa", "AZ"},
    {"virginia beach", "VA"}, {"atlanta", "GA"}, {"colorado springs", "CO"}, {"raleigh", "NC"}, {"omaha", "NE"},
    {"miami", "FL"}, {"oakland", "CA"}, {"tulsa", "OK"}, {"minneapolis", "MN"}, {"cleveland", "OH"},
    {"wichita", "KS"}, {"arlington", "TX"}, {"new orleans", "LA"}, {"bakersfield", "CA"}, {"tampa", "FL"},
    {"honolulu", "HI"}, {"anaheim", "CA"}, {"aurora", "CO"}, {"santa ana", "CA"}, {"st louis", "MO"},
    {"saint louis", "MO"}, {"riverside", "CA"}, {"corpus christi", "TX"}, {"pittsburgh", "PA"}, {"lexington", "KY"},
    {"anchorage", "AK"}, {"stockton", "CA"}, {"cincinnati", "OH"}, {"st paul", "MN"}, {"saint paul", "MN"},
    {"toledo", "OH"}, {"newark", "NJ"}, {"greensboro", "NC"}, {"plano", "TX"}, {"henderson", "NV"},
    {"lincoln", "NE"}, {"buffalo", "NY"}, {"fort wayne", "IN"}, {"jersey city", "NJ"}, {"chula vista", "CA"},
    {"orlando", "FL"}, {"st petersburg", "FL"}, {"norfolk", "VA"}, {"chandler", "AZ"}, {"laredo", "TX"},
    {"madison", "WI"}, {"durham", "NC"}, {"lubbock", "TX"}, {"winston-salem", "NC"}, {"garland", "TX"},
    {"glendale", "AZ"}, {"hialeah", "FL"}, {"reno", "NV"}, {"baton rouge", "LA"}, {"irvine", "CA"},
    {"chesapeake", "VA"}, {"irving", "TX"}, {"scottsdale", "AZ"}, {"north las vegas", "NV"}, {"fremont", "CA"},
    {"gilbert", "AZ"}, {"san bernardino", "CA"}, {"boise", "ID"}, {"birmingham", "AL"}, {"rochester", "NY"},
    {"richmond", "VA"}, {"spokane", "WA"}, {"des moines", "IA"}, {"montgomery", "AL"}, {"modesto", "CA"},
    {"fayetteville", "NC"}, {"tacoma", "WA"}, {"shreveport", "LA"}, {"fontana", "CA"}, {"oxnard", "CA"},
    {"aurora", "IL"}, {"moreno valley", "CA"}, {"akron", "OH"}, {"yonkers", "NY"}, {"columbus", "GA"},
    {"augusta", "GA"}, {"little rock", "AR"}, {"amarillo", "TX"}, {"mobile", "AL"}, {"huntington beach", "CA"},
    {"glendale", "CA"}, {"grand rapids", "MI"}, {"salt lake city", "UT"}, {"tallahassee", "FL"}, {"huntsville", "AL"},
    {"worcester", "MA"}, {"knoxville", "TN"}, {"grand prairie", "TX"}, {"newport news", "VA"}, {"brownsville", "TX"},
    {"santa clarita", "CA"}, {"overland park", "KS"}, {"providence", "RI"}, {"jackson", "MS"}, {"garden grove", "CA"},
    {"oceanside", "CA"}, {"chattanooga", "TN"}, {"fort lauderdale", "FL"}, {"rancho cucamonga", "CA"},
    {"santa rosa", "CA"}, {"port st lucie", "FL"}, {"ontario", "CA"}, {"tempe", "AZ"}, {"vancouver", "WA"},
    {"springfield", "MO"}, {"cape coral", "FL"}, {"pembroke pines", "FL"}, {"sioux falls", "SD"}, {"peoria", "AZ"},
    {"lancaster", "CA"}, {"elk grove", "CA"}, {"corona", "CA"}, {"eugene", "OR"}, {"salem", "OR"},
    {"palmdale", "CA"}, {"salinas", "CA"}, {"springfield", "MA"}, {"pasadena", "TX"}, {"rockford", "IL"},
    {"pomona", "CA"}, {"hayward", "CA"}, {"fort collins", "CO"}, {"joliet", "IL"}, {"escondido", "CA"},
    {"kansas city", "KS"}, {"torrance", "CA"}, {"bridgeport", "CT"}, {"alexandria", "VA"}, {"sunnyvale", "CA"},
    {"cary", "NC"}, {"lakewood", "CO"}, {"hollywood", "FL"}, {"paterson", "NJ"}, {"syracuse", "NY"},
    {"naperville", "IL"}, {"mckinney", "TX"}, {"mesquite", "TX"}, {"clarksville", "TN"}, {"savannah", "GA"},
    {"dayton", "OH"}, {"orange", "CA"}, {"fullerton", "CA"}, {"pasadena", "CA"}, {"hampton", "VA"},
    {"mcallen", "TX"}, {"killeen", "TX"}, {"warren", "MI"}, {"west valley city", "UT"}, {"columbia", "SC"},
    {"new haven", "CT"}, {"sterling heights", "MI"}, {"olathe", "KS"}, {"miramar", "FL"}, {"thousand oaks", "CA"},
    {"frisco", "TX"}, {"cedar rapids", "IA"}, {"topeka", "KS"}, {"visalia", "CA"}, {"waco", "TX"},
    {"elizabeth", "NJ"}, {"bellevue", "WA"}, {"gainesville", "FL"}, {"simi valley", "CA"}, {"charleston", "SC"},
    {"carrollton", "TX"}, {"coral springs", "FL"}, {"stamford", "CT"}, {"hartford", "CT"}, {"concord", "CA"},
    {"roseville", "CA"}, {"thornton", "CO"}, {"kent", "WA"}, {"lafayette", "LA"}, {"surprise", "AZ"},
    {"denton", "TX"}, {"victorville", "CA"}, {"evansville", "IN"}, {"midland", "TX"}, {"santa clara", "CA"},
    {"athens", "GA"}, {"allentown", "PA"}, {"abilene", "TX"}, {"beaumont", "TX"}, {"vallejo", "CA"},
    {"independence", "MO"}, {"springfield", "IL"}, {"ann arbor", "MI"}, {"provo", "UT"}, {"peoria", "IL"},
    {"norman", "OK"}, {"berkeley", "CA"}, {"el monte", "CA"}, {"murfreesboro", "TN"}, {"lansing", "MI"},
    {"columbia", "MO"}, {"downey", "CA"}, {"costa mesa", "CA"}, {"inglewood", "CA"}, {"miami gardens", "FL"},
    {"manchester", "NH"}, {"elgin", "IL"}, {"wilmington", "NC"}, {"waterbury", "CT"}, {"fargo", "ND"},
    {"arvada", "CO"}, {"carlsbad", "CA"}, {"westminster", "CO"}, {"rochester", "MN"}, {"gresham", "OR"},
    {"clearwater", "FL"}, {"lowell", "MA"}, {"west jordan", "UT"}, {"pueblo", "CO"}, {"fairfield", "CA"},
    {"west covina", "CA"}, {"billings", "MT"}, {"murrieta", "CA"}, {"high point", "NC"}, {"round rock", "TX"},
    {"richmond", "CA"}, {"cambridge", "MA"}, {"norwalk", "CA"}, {"odessa", "TX"}, {"antioch", "CA"},
    {"temecula", "CA"}, {"green bay", "WI"}, {"everett", "WA"}, {"wichita falls", "TX"}, {"burbank", "CA"},
    {"palm bay", "FL"}, {"centennial", "CO"}, {"daly city", "CA"}, {"richardson", "TX"}, {"pompano beach", "FL"},
    {"broken arrow", "OK"}, {"north charleston", "SC"}, {"west palm beach", "FL"}, {"boulder", "CO"},
    {"rialto", "CA"}, {"santa maria", "CA"}, {"el cajon", "CA"}, {"davenport", "IA"}, {"erie", "PA"},
    {"las cruces", "NM"}, {"south bend", "IN"}, {"flint", "MI"}, {"kenosha", "WI"}, {"charleston", "WV"},
    {"portland", "ME"}, {"jackson", "TN"}, {"wilmington", "DE"}, {"concord", "NH"}, {"augusta", "ME"},
    {"cheyenne", "WY"}, {"casper", "WY"}, {"burlington", "VT"}, {"montpelier", "VT"}, {"dover", "DE"},
    {"bismarck", "ND"}, {"juneau", "AK"}, {"fairbanks", "AK"}, {"helena", "MT"}, {"missoula", "MT"},
    {"sioux city", "IA"}, {"iowa city", "IA"}, {"annapolis", "MD"}, {"harrisburg", "PA"}, {"trenton", "NJ"},
    {"albany", "NY"}, {"baton rouge", "LA"}, {"frankfort", "KY"}, {"jefferson city", "MO"}, {"pierre", "SD"},
    {"rapid city", "SD"}, {"carson city", "NV"}, {"santa fe", "NM"}, {"olympia", "WA"}, {"atlantic city", "NJ"},
    {"scranton", "PA"}, {"new brunswick", "NJ"}, {"hoboken", "NJ"}, {"brooklyn", "NY"}, {"queens", "NY"},
    {"bronx", "NY"}, {"staten island", "NY"}, {"manhattan", "NY"}, {"newtown", "CT"}, {"chapel hill", "NC"},
    {"knoxville", "TN"}, {"morgantown", "WV"}, {"huntington", "WV"}, {"manchester", "NH"}, {"nashua", "NH"},
    {"bangor", "ME"}, {"lewiston", "ME"}, {"warwick", "RI"}, {"cranston", "RI"}, {"pawtucket", "RI"},
    {"hattiesburg", "MS"}, {"gulfport", "MS"}, {"biloxi", "MS"}, {"tuscaloosa", "AL"}, {"fort smith", "AR"},
    {"jonesboro", "AR"}, {"bentonville", "AR"}, {"lawton", "OK"}, {"edmond", "OK"}, {"ogden", "UT"},
    {"st george", "UT"}, {"nampa", "ID"}, {"idaho falls", "ID"}, {"pocatello", "ID"}, {"grand forks", "ND"},
    {"minot", "ND"}, {"duluth", "MN"}, {"bloomington", "MN"}, {"bloomington", "IN"}, {"bloomington", "IL"},
};

// Aliases that name a US state but are too often something else.
inline constexpr std::string_view kExtraAmbiguous[] = {"washington", "vancouver"};

} // namespace stancetopic::geo_data
