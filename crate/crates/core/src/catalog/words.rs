//! Bundled vocabulary for synthetic catalogs. No entry contains a digit, so
//! every number in a rendered description comes from the data.

use super::ValueKind;

/// (subject, unit for production/consumption/trade) used with [`COMMODITY_MEASURES`].
pub(super) const COMMODITIES: &[&str] = &[
    "rice", "wheat", "maize", "barley", "coffee", "tea", "cocoa", "sugar", "soybean", "cotton",
    "palm oil", "olive oil", "fish", "beef", "pork", "poultry", "milk", "cheese", "butter",
    "eggs", "potatoes", "bananas", "apples", "oranges", "grapes", "tomatoes", "onions",
    "natural gas", "crude oil", "coal", "steel", "cement", "timber", "copper", "aluminium",
    "fertilizer", "wool", "rubber",
];

/// (prefix, suffix, unit, kind); the indicator name is `prefix + subject + suffix`.
pub(super) const COMMODITY_MEASURES: &[(&str, &str, &str, ValueKind)] = &[
    ("", " production", "metric tons", ValueKind::Float),
    ("", " consumption", "kilograms per capita", ValueKind::Float),
    ("", " exports", "US dollars", ValueKind::Float),
    ("", " imports", "US dollars", ValueKind::Float),
    ("share of ", " in total exports", "percent", ValueKind::Percentage),
];

/// Population groups counted or measured as shares.
pub(super) const GROUPS: &[&str] = &[
    "children", "adults", "elderly people", "women", "men", "students", "teachers",
    "farmers", "factory workers", "nurses", "physicians", "tourists", "migrants",
    "households", "pensioners", "university graduates", "internet users",
    "mobile phone subscribers", "car owners", "smokers", "young people", "refugees",
];

pub(super) const GROUP_MEASURES: &[(&str, &str, &str, ValueKind)] = &[
    ("number of ", "", "people", ValueKind::PositiveInteger),
    ("share of ", " in the population", "percent", ValueKind::Percentage),
    ("average income of ", "", "US dollars", ValueKind::Float),
    ("unemployment rate among ", "", "percent", ValueKind::Percentage),
];

/// Free-standing indicators with their own units.
pub(super) const STANDALONE: &[(&str, &str, ValueKind)] = &[
    ("total population", "people", ValueKind::PositiveInteger),
    ("GDP", "US dollars", ValueKind::Float),
    ("GDP growth", "percent", ValueKind::Percentage),
    ("GDP per capita", "US dollars", ValueKind::Float),
    ("inflation rate", "percent", ValueKind::Percentage),
    ("literacy rate", "percent", ValueKind::Percentage),
    ("life expectancy", "years", ValueKind::Float),
    ("carbon dioxide emissions", "kilotons", ValueKind::Float),
    ("electricity consumption", "kilowatt hours", ValueKind::Float),
    ("renewable energy share", "percent", ValueKind::Percentage),
    ("forest area", "square kilometres", ValueKind::Float),
    ("arable land", "percent", ValueKind::Percentage),
    ("number of hospital beds", "beds", ValueKind::PositiveInteger),
    ("number of international visitors", "visitors", ValueKind::PositiveInteger),
    ("number of registered vehicles", "vehicles", ValueKind::PositiveInteger),
    ("number of patent applications", "applications", ValueKind::PositiveInteger),
    ("number of airline passengers", "passengers", ValueKind::PositiveInteger),
    ("number of new businesses", "businesses", ValueKind::PositiveInteger),
    ("government spending on education", "US dollars", ValueKind::Float),
    ("government spending on health", "US dollars", ValueKind::Float),
    ("military expenditure", "US dollars", ValueKind::Float),
    ("foreign direct investment", "US dollars", ValueKind::Float),
    ("tax revenue", "US dollars", ValueKind::Float),
    ("household savings rate", "percent", ValueKind::Percentage),
    ("urban population share", "percent", ValueKind::Percentage),
    ("access to clean water", "percent", ValueKind::Percentage),
    ("school enrolment rate", "percent", ValueKind::Percentage),
    ("fast food consumption", "servings per week", ValueKind::Float),
    ("annual rainfall", "millimetres", ValueKind::Float),
    ("freight transported by rail", "tonne kilometres", ValueKind::Float),
];

/// Qualifiers appended to reach large indicator counts.
pub(super) const SCOPES: &[&str] = &[
    " in urban areas", " in rural areas", " in the public sector", " in the private sector",
];

pub(super) const COUNTRIES: &[&str] = &[
    "Argentina", "Australia", "Austria", "Belgium", "Brazil", "Canada", "Chile", "China",
    "Colombia", "Denmark", "Egypt", "Finland", "France", "Georgia", "Germany", "Greece",
    "Hungary", "India", "Indonesia", "Ireland", "Italy", "Japan", "Kenya", "Malaysia",
    "Mexico", "Morocco", "Netherlands", "New Zealand", "Nigeria", "Norway", "Peru",
    "Philippines", "Poland", "Portugal", "Singapore", "South Africa", "South Korea", "Spain",
    "Sweden", "Switzerland", "Thailand", "Turkey", "Ukraine", "the United Kingdom",
    "the United States", "Vietnam", "Iceland", "Uruguay", "Estonia", "Ghana",
];

pub(super) const CITIES: &[&str] = &[
    "London", "Paris", "Tokyo", "Sydney", "Toronto", "Berlin", "Madrid", "Rome", "Seoul",
    "Bangkok", "Nairobi", "Lima", "Oslo", "Vienna", "Dublin", "Lisbon", "Prague", "Warsaw",
    "Athens", "Helsinki", "Cairo", "Mumbai", "Jakarta", "Manila", "Santiago", "Bogota",
    "Melbourne", "Vancouver", "Osaka", "Hamburg",
];

pub(super) const STATES: &[&str] = &[
    "California", "Texas", "Ontario", "Quebec", "Bavaria", "Queensland", "Victoria",
    "Saskatchewan", "Alberta", "Florida",
];
