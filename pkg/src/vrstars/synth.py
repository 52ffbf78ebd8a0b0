"""Synthetic accommodation corpus with a known ground-truth quality class.

Every property draws a latent class z in 1..5. Hotels expose z as official
stars; vacation rentals keep it hidden (the generator returns it separately as
ground truth). Amenities switch on with class-dependent probabilities that are
nondecreasing in z for monotone features, and top-class properties may
under-report amenities. Guests prefer a class and mostly book inside it, which
gives vacation rentals and hotels overlapping guest populations.

Properties split into two segments (standalone houses vs apartments) that
reinterpret the evidence: each amenity is class-revealing only for its
audience segment and a flat background elsewhere, and house sizes run on a
larger scale than apartment sizes. Reading a property correctly therefore
requires conditioning on the segment flag, not just summing feature scores.

Each randomized stage draws from its own child stream of the seed, so changing
one knob (say ``underreport_rate``) leaves every other stage's draws intact.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import KIND_HOTEL, KIND_VR, Dataset, PropertyRecord, StayTable
from .schema import KIND_BINARY, KIND_NUMERIC, N_CLASSES, FeatureSchema, FeatureSpec

#: Presence probability of a monotone amenity as a function of z - tier.
_TIER_RAMP = {-4: 0.02, -3: 0.03, -2: 0.06, -1: 0.22, 0: 0.70, 1: 0.88, 2: 0.94, 3: 0.96, 4: 0.97}

#: (name, tier, audience). Inside its audience segment an amenity follows the
#: class ramp for its tier; in the other segment it appears at a fixed
#: background rate. What a present amenity says about z therefore depends on
#: the segment, which no single per-feature weight can express.
_AMENITY_TIERS = [
    # tier 1: basics found in nearly every decent listing
    ("wifi", 1, "apartment"), ("heating", 1, "house"),
    ("hairdryer", 1, "apartment"), ("electric_kettle", 1, "house"),
    ("bed_linen", 1, "apartment"), ("towels", 1, "apartment"),
    # tier 2
    ("flat_screen_tv", 2, "apartment"), ("microwave", 2, "house"),
    ("refrigerator", 2, "house"), ("coffee_machine", 2, "apartment"),
    ("balcony", 2, "apartment"), ("free_parking", 2, "house"),
    # tier 3
    ("dishwasher", 3, "house"), ("washing_machine", 3, "house"),
    ("air_conditioning", 3, "apartment"), ("cable_channels", 3, "apartment"),
    ("garden", 3, "house"), ("terrace", 3, "house"),
    # tier 4
    ("bathtub", 4, "house"), ("streaming_services", 4, "apartment"),
    ("barbecue", 4, "house"), ("crib", 4, "house"),
    ("safe_deposit_box", 4, "apartment"), ("room_service", 4, "apartment"),
    # tier 5: luxury touches
    ("swimming_pool", 5, "house"), ("hot_tub", 5, "house"),
    ("daily_maid_service", 5, "apartment"),
]

#: Class-independent presence rate outside an amenity's audience segment.
_OFF_AUDIENCE_P = {1: 0.94, 2: 0.70, 3: 0.06, 4: 0.88, 5: 0.22}

#: Amenities that standalone houses have and apartments mostly lack.
_OUTDOOR = {"garden", "terrace", "barbecue", "swimming_pool", "hot_tub"}

#: Per-class probabilities for the non-monotone binaries, by segment where
#: relevant (house, apartment).
_SHARED_BATHROOM_P = (0.55, 0.38, 0.22, 0.10, 0.04)
_PETS_P = {"house": 0.55, "apartment": 0.25}
_HOUSE_FLAG_P = {"house": 0.97, "apartment": 0.03}

#: Apartment size means per class; houses are the same classes scaled up, so
#: the class a given size suggests depends on the segment (a 60 m2 apartment
#: and a 60 m2 house sit at opposite ends of the scale).
_SIZE_MEAN = (20.0, 27.0, 36.0, 48.0, 64.0)
_SIZE_SCALE = {"house": 2.4, "apartment": 1.0}
_ROOMS_P = (0.04, 0.12, 0.25, 0.40, 0.55)


def default_schema() -> FeatureSchema:
    """30 binary features (27 suggestible amenities, 3 neutral flags) + 2 numerics."""
    specs = []
    for name, _tier, _audience in _AMENITY_TIERS:
        specs.append(
            FeatureSpec(len(specs), name, KIND_BINARY, monotone=1, suggestible=True)
        )
    for name in ("shared_bathroom", "pets_allowed", "standalone_house"):
        specs.append(FeatureSpec(len(specs), name, KIND_BINARY))
    specs.append(FeatureSpec(len(specs), "size_m2", KIND_NUMERIC, monotone=1))
    specs.append(FeatureSpec(len(specs), "n_rooms", KIND_NUMERIC, monotone=1))
    return FeatureSchema(specs)


@dataclass
class SynthConfig:
    """Knobs for the generator; defaults give a balanced desk-scale corpus."""

    n_properties: int = 20_000
    hotel_fraction: float = 0.5
    class_prior: tuple[float, ...] = (0.05, 0.18, 0.45, 0.24, 0.07)
    amenity_lift: dict[str, tuple[float, ...]] | None = None
    underreport_rate: float = 0.15
    n_guests: int = 5_000
    stays_per_guest: int = 8
    guest_noise: float = 0.1
    seed: int = 0

    def validate(self, schema: FeatureSchema) -> None:
        if self.n_properties <= 0 or self.n_guests < 0 or self.stays_per_guest < 0:
            raise ValueError("corpus sizes must be positive")
        if not 0.0 <= self.hotel_fraction <= 1.0:
            raise ValueError("hotel_fraction must lie in [0, 1]")
        if not 0.0 <= self.underreport_rate <= 1.0:
            raise ValueError("underreport_rate must lie in [0, 1]")
        if not 0.0 <= self.guest_noise <= 1.0:
            raise ValueError("guest_noise must lie in [0, 1]")
        prior = np.asarray(self.class_prior, dtype=np.float64)
        if prior.shape != (N_CLASSES,) or np.any(prior < 0):
            raise ValueError("class_prior must be 5 nonnegative weights")
        # Published class distributions round to whole percents, so accept a
        # small deficit and renormalize instead of demanding an exact sum.
        if abs(prior.sum() - 1.0) > 0.02:
            raise ValueError(f"class_prior must sum to ~1, got {prior.sum():.4f}")
        if self.amenity_lift is not None:
            for name, probs in self.amenity_lift.items():
                spec = schema[schema.index(name)]
                if spec.kind != KIND_BINARY:
                    raise ValueError(f"amenity_lift entry {name!r} is not binary")
                p = np.asarray(probs, dtype=np.float64)
                if p.shape != (N_CLASSES,) or np.any(p < 0) or np.any(p > 1):
                    raise ValueError(f"amenity_lift[{name!r}] must be 5 probabilities")
                if spec.monotone == 1 and np.any(np.diff(p) < 0):
                    raise ValueError(
                        f"amenity_lift[{name!r}] must be nondecreasing for a +1 feature"
                    )

    def prior(self) -> np.ndarray:
        p = np.asarray(self.class_prior, dtype=np.float64)
        return p / p.sum()


def _amenity_probability(
    name: str, tier: int, audience: str, z: np.ndarray, segment_house: np.ndarray
) -> np.ndarray:
    """Presence probability per property for one monotone amenity.

    Class ramp inside the audience segment, flat background rate outside it.
    Both branches are nondecreasing in z, so the +1 semantics hold everywhere.
    """
    ramp = np.array([_TIER_RAMP[c - tier] for c in range(1, N_CLASSES + 1)])
    in_audience = segment_house if audience == "house" else ~segment_house
    p = np.where(in_audience, ramp[z - 1], _OFF_AUDIENCE_P[tier])
    if name in _OUTDOOR:
        p = np.where(segment_house, p, p * 0.12)
    return p


def generate_synthetic(cfg: SynthConfig, schema: FeatureSchema | None = None):
    """Build (dataset, stays, ground_truth) deterministically from ``cfg.seed``.

    ``ground_truth`` is the latent class of every record, aligned with
    ``dataset.records``. The dataset itself carries no labels: hotels state
    their class as official stars, vacation rentals reveal nothing.
    """
    if schema is None:
        schema = default_schema()
    cfg.validate(schema)
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(cfg.seed).spawn(6)]
    rng_class, rng_amenity, rng_under, rng_numeric, rng_guest, rng_stay = streams

    n = cfg.n_properties
    prior = cfg.prior()
    z = rng_class.choice(np.arange(1, N_CLASSES + 1), size=n, p=prior)
    segment_house = rng_class.random(n) < 0.5

    tier_by_name = {name: (tier, audience) for name, tier, audience in _AMENITY_TIERS}
    lift = cfg.amenity_lift or {}
    X = np.zeros((n, len(schema)), dtype=np.float64)
    for spec in schema:
        if spec.kind != KIND_BINARY:
            continue
        if spec.name in lift:
            p = np.asarray(lift[spec.name], dtype=np.float64)[z - 1]
        elif spec.name in tier_by_name:
            tier, audience = tier_by_name[spec.name]
            p = _amenity_probability(spec.name, tier, audience, z, segment_house)
        elif spec.name == "shared_bathroom":
            p = np.asarray(_SHARED_BATHROOM_P)[z - 1]
        elif spec.name == "pets_allowed":
            p = np.where(segment_house, _PETS_P["house"], _PETS_P["apartment"])
        elif spec.name == "standalone_house":
            p = np.where(segment_house, _HOUSE_FLAG_P["house"], _HOUSE_FLAG_P["apartment"])
        else:
            p = np.full(n, 0.3)
        X[:, spec.id] = (rng_amenity.random(n) < p).astype(np.float64)

    # Top-class listings omit amenities they take for granted. The mask stream
    # draws one uniform per (property, monotone amenity) regardless of the
    # rate, so corpora that differ only in underreport_rate stay aligned.
    for spec in schema:
        if spec.kind == KIND_BINARY and spec.monotone == 1:
            u = rng_under.random(n)
            hide = (u < cfg.underreport_rate) & (z >= 4)
            X[hide, spec.id] = 0.0

    for spec in schema:
        if spec.kind != KIND_NUMERIC:
            continue
        if spec.name == "size_m2":
            mean = np.asarray(_SIZE_MEAN)[z - 1]
            scale = np.where(segment_house, _SIZE_SCALE["house"], _SIZE_SCALE["apartment"])
            size = mean * scale * np.exp(rng_numeric.normal(0.0, 0.35, size=n))
            X[:, spec.id] = np.round(size, 1)
        elif spec.name == "n_rooms":
            base = 1 + rng_numeric.binomial(5, np.asarray(_ROOMS_P)[z - 1])
            extra = (segment_house & (rng_numeric.random(n) < 0.5)).astype(np.int64)
            X[:, spec.id] = (base + extra).astype(np.float64)
        else:
            X[:, spec.id] = np.round(rng_numeric.random(n) * 10, 2)

    n_hotels = int(round(n * cfg.hotel_fraction))
    records = []
    for i in range(n):
        if i < n_hotels:
            pid, kind, stars = f"h{i + 1:06d}", KIND_HOTEL, int(z[i])
        else:
            pid, kind, stars = f"v{i - n_hotels + 1:06d}", KIND_VR, None
        records.append(PropertyRecord(pid, kind, stars, X[i]))
    dataset = Dataset(schema=schema, records=records)

    by_class = [np.flatnonzero(z == c) for c in range(1, N_CLASSES + 1)]
    pref = rng_guest.choice(np.arange(1, N_CLASSES + 1), size=cfg.n_guests, p=prior)
    guest_col: list[str] = []
    prop_col: list[str] = []
    n_stays = cfg.n_guests * cfg.stays_per_guest
    noisy = rng_stay.random(n_stays) < cfg.guest_noise
    random_class = rng_stay.integers(1, N_CLASSES + 1, size=n_stays)
    pick = rng_stay.random(n_stays)
    ids = dataset.ids
    row = 0
    for g in range(cfg.n_guests):
        gid = f"g{g + 1:06d}"
        for _ in range(cfg.stays_per_guest):
            target = int(random_class[row]) if noisy[row] else int(pref[g])
            pool = by_class[target - 1]
            if pool.size == 0:
                pool = np.arange(n)  # degenerate prior: fall back to anywhere
            prop = int(pool[int(pick[row] * pool.size)])
            guest_col.append(gid)
            prop_col.append(ids[prop])
            row += 1
    stays = StayTable(guest_ids=tuple(guest_col), property_ids=tuple(prop_col))

    return dataset, stays, [int(v) for v in z]
