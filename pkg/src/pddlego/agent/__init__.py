from .commands import MissingDirection, ground_action_to_command, order_plan
from .loop import AgentConfig, EpisodeResult, RetryableFailure, Strategy, run_episode, trace_lines
from .subgoals import Knowledge, SubGoalStack, build_subgoals, recipe_goal

__all__ = [
    "AgentConfig",
    "EpisodeResult",
    "Knowledge",
    "MissingDirection",
    "RetryableFailure",
    "Strategy",
    "SubGoalStack",
    "build_subgoals",
    "ground_action_to_command",
    "order_plan",
    "recipe_goal",
    "run_episode",
    "trace_lines",
]
