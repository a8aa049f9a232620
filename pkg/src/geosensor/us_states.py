"""US states (50 plus DC) with postal codes and approximate centroids."""

# code, name, lat, lon
STATES = (
    ("AL", "alabama", 32.8, -86.8),
    ("AK", "alaska", 64.7, -152.0),
    ("AZ", "arizona", 34.3, -111.7),
    ("AR", "arkansas", 34.9, -92.4),
    ("CA", "california", 37.2, -119.5),
    ("CO", "colorado", 39.0, -105.5),
    ("CT", "connecticut", 41.6, -72.7),
    ("DE", "delaware", 39.0, -75.5),
    ("DC", "district of columbia", 38.9, -77.0),
    ("FL", "florida", 28.6, -82.4),
    ("GA", "georgia", 32.7, -83.4),
    ("HI", "hawaii", 20.8, -156.3),
    ("ID", "idaho", 44.4, -114.6),
    ("IL", "illinois", 40.0, -89.2),
    ("IN", "indiana", 39.9, -86.3),
    ("IA", "iowa", 42.1, -93.5),
    ("KS", "kansas", 38.5, -98.4),
    ("KY", "kentucky", 37.5, -85.3),
    ("LA", "louisiana", 31.1, -92.0),
    ("ME", "maine", 45.4, -69.2),
    ("MD", "maryland", 39.0, -76.8),
    ("MA", "massachusetts", 42.3, -71.8),
    ("MI", "michigan", 44.3, -85.4),
    ("MN", "minnesota", 46.3, -94.3),
    ("MS", "mississippi", 32.7, -89.7),
    ("MO", "missouri", 38.4, -92.5),
    ("MT", "montana", 47.0, -109.6),
    ("NE", "nebraska", 41.5, -99.8),
    ("NV", "nevada", 39.3, -116.6),
    ("NH", "new hampshire", 43.7, -71.6),
    ("NJ", "new jersey", 40.2, -74.7),
    ("NM", "new mexico", 34.4, -106.1),
    ("NY", "new york", 42.9, -75.5),
    ("NC", "north carolina", 35.6, -79.4),
    ("ND", "north dakota", 47.5, -100.5),
    ("OH", "ohio", 40.3, -82.8),
    ("OK", "oklahoma", 35.6, -97.5),
    ("OR", "oregon", 43.9, -120.6),
    ("PA", "pennsylvania", 40.9, -77.8),
    ("RI", "rhode island", 41.7, -71.6),
    ("SC", "south carolina", 33.9, -80.9),
    ("SD", "south dakota", 44.4, -100.2),
    ("TN", "tennessee", 35.9, -86.4),
    ("TX", "texas", 31.5, -99.3),
    ("UT", "utah", 39.3, -111.7),
    ("VT", "vermont", 44.1, -72.7),
    ("VA", "virginia", 37.5, -78.9),
    ("WA", "washington", 47.4, -120.5),
    ("WV", "west virginia", 38.6, -80.6),
    ("WI", "wisconsin", 44.6, -89.9),
    ("WY", "wyoming", 43.0, -107.6),
)

STATE_CODES = frozenset(code for code, *_ in STATES)

# normalized token -> postal code; both the full name and the lowercased code
STATE_TOKENS = {name: code for code, name, _, _ in STATES}
STATE_TOKENS.update({code.lower(): code for code in STATE_CODES})
