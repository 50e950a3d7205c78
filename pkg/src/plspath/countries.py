"""EU-27 country identifiers (ISO 3166 alpha-2) and their English names."""

EU27 = {
    "AT": "Austria",
    "BE": "Belgium",
    "BG": "Bulgaria",
    "HR": "Croatia",
    "CY": "Cyprus",
    "CZ": "Czech Republic",
    "DK": "Denmark",
    "EE": "Estonia",
    "FI": "Finland",
    "FR": "France",
    "DE": "Germany",
    "GR": "Greece",
    "HU": "Hungary",
    "IE": "Ireland",
    "IT": "Italy",
    "LV": "Latvia",
    "LT": "Lithuania",
    "LU": "Luxembourg",
    "MT": "Malta",
    "NL": "Netherlands",
    "PL": "Poland",
    "PT": "Portugal",
    "RO": "Romania",
    "SK": "Slovakia",
    "SI": "Slovenia",
    "ES": "Spain",
    "SE": "Sweden",
}

# Eurostat uses EL for Greece; Czechia is the current short name.
_ALIASES = {"EL": "GR", "CZECHIA": "CZ", "UK": "GB"}
_BY_NAME = {name.upper(): code for code, name in EU27.items()}


def canonical(identifier):
    """Map a country code or English name onto its ISO alpha-2 code.

    Identifiers that are not recognised are returned stripped but otherwise
    unchanged, so non-EU data sets still load.
    """
    key = identifier.strip()
    up = key.upper()
    if up in EU27:
        return up
    if up in _ALIASES:
        return _ALIASES[up]
    if up in _BY_NAME:
        return _BY_NAME[up]
    return key


def display_name(code):
    return EU27.get(code, code)
