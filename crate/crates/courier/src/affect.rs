//! PAD (pleasure, arousal, dominance) affect dynamics.
//!
//! An agent's emotional state is a point in PAD space. The five basic
//! emotions are fixed anchor points; the intensity of an emotion falls
//! off linearly with Euclidean distance from its anchor, and the
//! strongest active emotion is the agent's mood. Pleasure and dominance
//! decay each cycle proportionally to arousal, arousal tracks changes
//! in the emotion sources, and personality rescales the decay constants.

use serde::{Deserialize, Serialize};

fn clamp(v: f64, lo: f64, hi: f64) -> f64 {
    v.max(lo).min(hi)
}

/// Continuous affect point. Pleasure and dominance live in [-1, 1],
/// arousal in [0, 1]; every update clamps back into range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PadState {
    pub pleasure: f64,
    pub arousal: f64,
    pub dominance: f64,
}

impl PadState {
    pub const NEUTRAL: PadState = PadState {
        pleasure: 0.0,
        arousal: 0.0,
        dominance: 0.0,
    };

    pub fn new(pleasure: f64, arousal: f64, dominance: f64) -> Self {
        PadState {
            pleasure,
            arousal,
            dominance,
        }
        .clamped()
    }

    fn clamped(self) -> Self {
        PadState {
            pleasure: clamp(self.pleasure, -1.0, 1.0),
            arousal: clamp(self.arousal, 0.0, 1.0),
            dominance: clamp(self.dominance, -1.0, 1.0),
        }
    }

    pub fn in_bounds(&self) -> bool {
        (-1.0..=1.0).contains(&self.pleasure)
            && (0.0..=1.0).contains(&self.arousal)
            && (-1.0..=1.0).contains(&self.dominance)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmotionLabel {
    Joy,
    Sad,
    Surprise,
    Fearful,
    Angry,
}

/// Fixed PAD coordinates of one basic emotion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmotionAnchor {
    pub label: EmotionLabel,
    pub pleasure: f64,
    pub arousal: f64,
    pub dominance: f64,
}

impl EmotionAnchor {
    pub fn distance_to(&self, pad: &PadState) -> f64 {
        let dp = pad.pleasure - self.pleasure;
        let da = pad.arousal - self.arousal;
        let dd = pad.dominance - self.dominance;
        (dp * dp + da * da + dd * dd).sqrt()
    }
}

/// The five gait-perceivable emotions. Array order doubles as the
/// tie-break order when several moods have equal intensity.
pub const ANCHORS: [EmotionAnchor; 5] = [
    EmotionAnchor {
        label: EmotionLabel::Joy,
        pleasure: 0.75,
        arousal: 0.48,
        dominance: 0.35,
    },
    EmotionAnchor {
        label: EmotionLabel::Sad,
        pleasure: -0.63,
        arousal: 0.27,
        dominance: -0.33,
    },
    EmotionAnchor {
        label: EmotionLabel::Surprise,
        pleasure: 0.4,
        arousal: 0.67,
        dominance: -0.13,
    },
    EmotionAnchor {
        label: EmotionLabel::Fearful,
        pleasure: -0.64,
        arousal: 0.6,
        dominance: -0.43,
    },
    EmotionAnchor {
        label: EmotionLabel::Angry,
        pleasure: -0.51,
        arousal: 0.59,
        dominance: 0.25,
    },
];

pub fn anchor(label: EmotionLabel) -> &'static EmotionAnchor {
    ANCHORS
        .iter()
        .find(|a| a.label == label)
        .expect("all labels anchored")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoodLabel {
    Joy,
    Sad,
    Surprise,
    Fearful,
    Angry,
    Neutral,
}

impl From<EmotionLabel> for MoodLabel {
    fn from(e: EmotionLabel) -> Self {
        match e {
            EmotionLabel::Joy => MoodLabel::Joy,
            EmotionLabel::Sad => MoodLabel::Sad,
            EmotionLabel::Surprise => MoodLabel::Surprise,
            EmotionLabel::Fearful => MoodLabel::Fearful,
            EmotionLabel::Angry => MoodLabel::Angry,
        }
    }
}

/// Strongest active emotion; `Neutral` with zero intensity when every
/// anchor is out of reach.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mood {
    pub label: MoodLabel,
    pub intensity: f64,
}

impl Mood {
    pub const NEUTRAL: Mood = Mood {
        label: MoodLabel::Neutral,
        intensity: 0.0,
    };
}

/// Static Eysenck trait, fixed at agent creation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Personality {
    Extroverted,
    Neurotic,
    Psychotic,
}

/// Activation radii and per-dimension softening constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffectParams {
    /// Inner radius: full intensity at or below this distance.
    pub delta_e: f64,
    /// Outer radius: zero intensity at or beyond this distance.
    pub phi_e: f64,
    pub v_p: f64,
    pub v_a: f64,
    pub v_d: f64,
    /// When set, pleasure/dominance decay stops at zero instead of
    /// drifting across it.
    pub decay_toward_zero: bool,
}

impl Default for AffectParams {
    fn default() -> Self {
        AffectParams {
            delta_e: 0.2,
            phi_e: 1.0,
            v_p: 0.1,
            v_a: 0.1,
            v_d: 0.1,
            decay_toward_zero: false,
        }
    }
}

impl AffectParams {
    pub fn is_valid(&self) -> bool {
        self.delta_e > 0.0
            && self.delta_e < self.phi_e
            && (0.0..=1.0).contains(&self.v_p)
            && self.v_p > 0.0
            && (0.0..=1.0).contains(&self.v_a)
            && self.v_a > 0.0
            && (0.0..=1.0).contains(&self.v_d)
            && self.v_d > 0.0
    }
}

/// Softening constant used instead of the configured one when the
/// personality promotes the matching PAD sign.
pub const PROMOTED_SOFTENING: f64 = 0.05;

/// Binary contributions to arousal, recomputed every cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SourceVector {
    pub anger_perceived: bool,
    pub own_privacy: bool,
    pub alien_privacy: bool,
}

impl SourceVector {
    fn components(&self) -> [f64; 3] {
        [
            self.anger_perceived as u8 as f64,
            self.own_privacy as u8 as f64,
            self.alien_privacy as u8 as f64,
        ]
    }
}

/// Intensity of one emotion: 1 inside the inner radius, 0 outside the
/// outer radius, linear in between.
pub fn emotion_intensity(pad: &PadState, anchor: &EmotionAnchor, params: &AffectParams) -> f64 {
    let d = anchor.distance_to(pad);
    clamp(
        1.0 - (d - params.delta_e) / (params.phi_e - params.delta_e),
        0.0,
        1.0,
    )
}

/// The anchor with maximal intensity wins; ties go to the earlier
/// anchor in `ANCHORS` order.
pub fn mood(pad: &PadState, params: &AffectParams) -> Mood {
    let mut best: Option<(EmotionLabel, f64)> = None;
    for a in &ANCHORS {
        let w = emotion_intensity(pad, a, params);
        if best.map_or(true, |(_, bw)| w > bw) {
            best = Some((a.label, w));
        }
    }
    match best {
        Some((label, w)) if w > 0.0 => Mood {
            label: label.into(),
            intensity: w,
        },
        _ => Mood::NEUTRAL,
    }
}

fn effective_softening(promoted: bool, configured: f64) -> f64 {
    if promoted {
        PROMOTED_SOFTENING
    } else {
        configured
    }
}

fn decay(value: f64, step: f64, toward_zero: bool) -> f64 {
    if toward_zero {
        if value > 0.0 {
            (value - step).max(0.0)
        } else if value < 0.0 {
            (value + step).min(0.0)
        } else {
            0.0
        }
    } else {
        value - step
    }
}

/// Per-cycle pleasure decay; extroversion keeps positive pleasure
/// longer, neuroticism keeps negative pleasure longer.
pub fn decay_pleasure(pad: &PadState, personality: Personality, params: &AffectParams) -> PadState {
    let promoted = (personality == Personality::Extroverted && pad.pleasure > 0.0)
        || (personality == Personality::Neurotic && pad.pleasure < 0.0);
    let step = effective_softening(promoted, params.v_p) * pad.arousal;
    PadState {
        pleasure: decay(pad.pleasure, step, params.decay_toward_zero),
        ..*pad
    }
    .clamped()
}

/// Arousal follows the change in the source vector between cycles.
pub fn update_arousal(
    pad: &PadState,
    prev: &SourceVector,
    curr: &SourceVector,
    params: &AffectParams,
) -> PadState {
    let delta: f64 = curr
        .components()
        .iter()
        .zip(prev.components())
        .map(|(c, p)| c - p)
        .sum::<f64>()
        * params.v_a;
    PadState {
        arousal: pad.arousal + delta,
        ..*pad
    }
    .clamped()
}

/// Per-cycle dominance decay; psychoticism keeps positive dominance
/// longer.
pub fn decay_dominance(
    pad: &PadState,
    personality: Personality,
    params: &AffectParams,
) -> PadState {
    let promoted = personality == Personality::Psychotic && pad.dominance > 0.0;
    let step = effective_softening(promoted, params.v_d) * pad.arousal;
    PadState {
        dominance: decay(pad.dominance, step, params.decay_toward_zero),
        ..*pad
    }
    .clamped()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PadDimension {
    Pleasure,
    Dominance,
}

/// Pure accumulation of event-driven pleasure/dominance adjustments:
/// sum per dimension, then clamp once.
pub fn apply_event_deltas(pad: &PadState, deltas: &[(PadDimension, f64)]) -> PadState {
    let mut pleasure = pad.pleasure;
    let mut dominance = pad.dominance;
    for (dim, v) in deltas {
        match dim {
            PadDimension::Pleasure => pleasure += v,
            PadDimension::Dominance => dominance += v,
        }
    }
    PadState {
        pleasure,
        arousal: pad.arousal,
        dominance,
    }
    .clamped()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params() -> AffectParams {
        AffectParams::default()
    }

    /// Independent evaluation of the intensity formula, kept separate
    /// from the production path on purpose.
    fn intensity_oracle(pad: &PadState, a: &EmotionAnchor, delta: f64, phi: f64) -> f64 {
        let d2 = (pad.pleasure - a.pleasure).powi(2)
            + (pad.arousal - a.arousal).powi(2)
            + (pad.dominance - a.dominance).powi(2);
        let w = 1.0 - (d2.sqrt() - delta) / (phi - delta);
        w.clamp(0.0, 1.0)
    }

    #[test]
    fn intensity_is_one_at_anchor() {
        let joy = anchor(EmotionLabel::Joy);
        let pad = PadState::new(0.75, 0.48, 0.35);
        assert_eq!(emotion_intensity(&pad, joy, &params()), 1.0);
    }

    #[test]
    fn intensity_is_zero_at_outer_radius() {
        let sad = anchor(EmotionLabel::Sad);
        // Exactly distance 1.0 from the sad anchor.
        let pad = PadState::new(sad.pleasure + 1.0, sad.arousal, sad.dominance);
        assert_relative_eq!(sad.distance_to(&pad), 1.0, epsilon = 1e-12);
        assert_eq!(emotion_intensity(&pad, sad, &params()), 0.0);
    }

    #[test]
    fn intensity_origin_vs_joy() {
        // d = sqrt(0.75^2 + 0.48^2 + 0.35^2) = sqrt(0.9154),
        // w = 1 - (d - 0.2) / 0.8 = 0.0540433...
        let w = emotion_intensity(&PadState::NEUTRAL, anchor(EmotionLabel::Joy), &params());
        assert_relative_eq!(w, 1.0 - (0.9154f64.sqrt() - 0.2) / 0.8, epsilon = 1e-12);
        assert_relative_eq!(w, 0.05404328, epsilon = 1e-6);
    }

    #[test]
    fn mood_at_angry_anchor() {
        let a = anchor(EmotionLabel::Angry);
        let m = mood(&PadState::new(a.pleasure, a.arousal, a.dominance), &params());
        assert_eq!(m.label, MoodLabel::Angry);
        assert_eq!(m.intensity, 1.0);
    }

    #[test]
    fn mood_at_origin_is_sad() {
        // Sad is the nearest anchor to the origin.
        let m = mood(&PadState::NEUTRAL, &params());
        assert_eq!(m.label, MoodLabel::Sad);
        let sad_d = anchor(EmotionLabel::Sad).distance_to(&PadState::NEUTRAL);
        assert_relative_eq!(m.intensity, 1.0 - (sad_d - 0.2) / 0.8, epsilon = 1e-12);
        assert_relative_eq!(m.intensity, 0.2990959, epsilon = 1e-6);
    }

    #[test]
    fn mood_is_neutral_when_all_anchors_out_of_reach() {
        let p = AffectParams {
            phi_e: 0.3,
            ..params()
        };
        let m = mood(&PadState::NEUTRAL, &p);
        assert_eq!(m.label, MoodLabel::Neutral);
        assert_eq!(m.intensity, 0.0);
    }

    #[test]
    fn pleasure_decay_examples() {
        let pad = PadState::new(0.5, 0.3, 0.0);
        let ext = decay_pleasure(&pad, Personality::Extroverted, &params());
        assert_relative_eq!(ext.pleasure, 0.485, epsilon = 1e-12);
        let psy = decay_pleasure(&pad, Personality::Psychotic, &params());
        assert_relative_eq!(psy.pleasure, 0.47, epsilon = 1e-12);
    }

    #[test]
    fn zero_arousal_decays_nothing() {
        for pers in [
            Personality::Extroverted,
            Personality::Neurotic,
            Personality::Psychotic,
        ] {
            let pad = PadState::new(-0.7, 0.0, 0.4);
            assert_eq!(decay_pleasure(&pad, pers, &params()), pad);
            assert_eq!(decay_dominance(&pad, pers, &params()), pad);
        }
    }

    #[test]
    fn arousal_update_examples() {
        let zero = SourceVector::default();
        let pad = PadState::new(0.0, 0.2, 0.0);
        assert_eq!(update_arousal(&pad, &zero, &zero, &params()), pad);

        let curr = SourceVector {
            anger_perceived: true,
            own_privacy: true,
            alien_privacy: false,
        };
        let up = update_arousal(&pad, &zero, &curr, &params());
        assert_relative_eq!(up.arousal, 0.4, epsilon = 1e-12);

        let prev = SourceVector {
            anger_perceived: true,
            ..zero
        };
        let low = PadState::new(0.0, 0.05, 0.0);
        let down = update_arousal(&low, &prev, &zero, &params());
        assert_eq!(down.arousal, 0.0);
    }

    #[test]
    fn dominance_decay_examples() {
        let pad = PadState::new(0.0, 0.5, 0.4);
        let psy = decay_dominance(&pad, Personality::Psychotic, &params());
        assert_relative_eq!(psy.dominance, 0.375, epsilon = 1e-12);
        let neu = decay_dominance(&pad, Personality::Neurotic, &params());
        assert_relative_eq!(neu.dominance, 0.35, epsilon = 1e-12);
    }

    #[test]
    fn event_delta_examples() {
        let pad = PadState::NEUTRAL;
        let up = apply_event_deltas(&pad, &[(PadDimension::Pleasure, 0.1)]);
        assert_eq!(up, PadState::new(0.1, 0.0, 0.0));

        let near_cap = PadState::new(0.95, 0.0, 0.2);
        let clamped = apply_event_deltas(
            &near_cap,
            &[(PadDimension::Pleasure, 0.1), (PadDimension::Dominance, -0.1)],
        );
        assert_eq!(clamped.pleasure, 1.0);
        assert_relative_eq!(clamped.dominance, 0.1, epsilon = 1e-12);

        assert_eq!(apply_event_deltas(&pad, &[]), pad);
    }

    #[test]
    fn decay_toward_zero_stops_at_zero() {
        let p = AffectParams {
            decay_toward_zero: true,
            ..params()
        };
        let pad = PadState::new(-0.02, 1.0, -0.02);
        let after = decay_dominance(&decay_pleasure(&pad, Personality::Extroverted, &p), Personality::Extroverted, &p);
        assert_eq!(after.pleasure, 0.0);
        assert_eq!(after.dominance, 0.0);
    }

    fn arb_pad() -> impl Strategy<Value = PadState> {
        (-1.0..=1.0f64, 0.0..=1.0f64, -1.0..=1.0f64)
            .prop_map(|(p, a, d)| PadState::new(p, a, d))
    }

    proptest! {
        #[test]
        fn intensity_matches_oracle(pad in arb_pad()) {
            for a in &ANCHORS {
                let w = emotion_intensity(&pad, a, &params());
                let o = intensity_oracle(&pad, a, 0.2, 1.0);
                prop_assert!((w - o).abs() < 1e-9);
            }
        }

        #[test]
        fn intensity_non_increasing_in_distance(p1 in arb_pad(), p2 in arb_pad()) {
            let joy = anchor(EmotionLabel::Joy);
            let (near, far) = if joy.distance_to(&p1) <= joy.distance_to(&p2) {
                (p1, p2)
            } else {
                (p2, p1)
            };
            prop_assert!(
                emotion_intensity(&near, joy, &params())
                    >= emotion_intensity(&far, joy, &params())
            );
        }

        #[test]
        fn updates_stay_in_bounds(
            pad in arb_pad(),
            deltas in proptest::collection::vec(
                (prop_oneof![Just(PadDimension::Pleasure), Just(PadDimension::Dominance)], -0.5..0.5f64),
                0..6,
            ),
            anger in any::<bool>(), own in any::<bool>(), alien in any::<bool>(),
        ) {
            let curr = SourceVector { anger_perceived: anger, own_privacy: own, alien_privacy: alien };
            let mut s = apply_event_deltas(&pad, &deltas);
            s = update_arousal(&s, &SourceVector::default(), &curr, &params());
            s = decay_pleasure(&s, Personality::Neurotic, &params());
            s = decay_dominance(&s, Personality::Psychotic, &params());
            prop_assert!(s.in_bounds());
        }

        #[test]
        fn personality_promotes_matching_sign(pad in arb_pad()) {
            if pad.pleasure > 0.0 && pad.arousal > 0.0 {
                let ext = decay_pleasure(&pad, Personality::Extroverted, &params());
                let psy = decay_pleasure(&pad, Personality::Psychotic, &params());
                prop_assert!(ext.pleasure >= psy.pleasure);
            }
            if pad.pleasure < 0.0 && pad.arousal > 0.0 {
                let neu = decay_pleasure(&pad, Personality::Neurotic, &params());
                let psy = decay_pleasure(&pad, Personality::Psychotic, &params());
                prop_assert!(neu.pleasure >= psy.pleasure);
            }
            if pad.dominance > 0.0 && pad.arousal > 0.0 {
                let psy = decay_dominance(&pad, Personality::Psychotic, &params());
                let ext = decay_dominance(&pad, Personality::Extroverted, &params());
                prop_assert!(psy.dominance >= ext.dominance);
            }
        }

        #[test]
        fn mood_intensity_is_argmax(pad in arb_pad()) {
            let m = mood(&pad, &params());
            let max = ANCHORS
                .iter()
                .map(|a| emotion_intensity(&pad, a, &params()))
                .fold(0.0f64, f64::max);
            prop_assert!((m.intensity - max).abs() < 1e-12);
            prop_assert_eq!(m.label == MoodLabel::Neutral, m.intensity == 0.0);
        }
    }
}
