//! Sparse 2-D tensor voting.

mod field;
mod multiscale;
mod sparse;
mod tensor;

pub use field::{
    build_ball_field, build_stick_field, curvature_weight, decay, field_radius, normal_at,
    stick_vote, FieldKind, OrientedStickFields, VoteGeometry, VotingField, DECAY_CUTOFF,
    DEFAULT_STICK_ORIENTATIONS, MAX_VOTE_ANGLE,
};
pub use multiscale::{
    cleanup, multiscale_enhance, multiscale_enhance_traced, multiscale_vote, stick_pass, MultiScaleParams, VotingStage,
    DEFAULT_BALL_ANGLES,
};
pub use sparse::{sparse_ball_vote, sparse_stick_vote, sparse_vote, SaliencyMaps, TokenField};
pub use tensor::{eigen_decompose, Eigen2, SymTensor2};
