use storeflow_sim::customer::{plan_next_target, Target};
use storeflow_sim::geometry::Point;
use storeflow_sim::StoreLayout;

#[test]
fn everything_behind_the_display_goes_via_a_corner() {
    let l = StoreLayout::default();
    let from = Point::new(17.0, 0.0);
    let remaining = [(0, Point::new(16.0, 30.0)), (1, Point::new(19.0, 30.0)), (2, Point::new(15.0, 20.0))];
    assert_eq!(plan_next_target(from, &remaining, &l), Some(Target::Waypoint(Point::new(20.0, 10.0))));
}

#[test]
fn a_visible_item_wins_over_a_closer_hidden_one() {
    let l = StoreLayout::default();
    let from = Point::new(15.0, 8.0);
    // Hidden at 14 m behind the display, visible at 15.26 m on the west wall.
    let remaining = [(0, Point::new(15.0, 22.0)), (1, Point::new(0.0, 5.0))];
    assert_eq!(plan_next_target(from, &remaining, &l), Some(Target::Item(1)));
}

#[test]
fn an_item_on_a_display_corner_is_visible_along_both_edges() {
    let l = StoreLayout::default();
    let corner = Point::new(20.0, 10.0);
    for from in [Point::new(20.0, 0.0), Point::new(30.0, 10.0), Point::new(25.0, 3.0)] {
        assert_eq!(plan_next_target(from, &[(0, corner)], &l), Some(Target::Item(0)));
    }
}

#[test]
fn nothing_left_means_no_target() {
    let l = StoreLayout::default();
    assert_eq!(plan_next_target(Point::new(1.0, 1.0), &[], &l), None);
}
