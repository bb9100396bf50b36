"""Polymind: an orchestration engine for LLM-assisted visual prewriting.

Diagram nodes on a canvas feed configurable "microtasks" — small prompt
templates with typed inputs and outputs — that run proactively on a timer or
reactively on click. Results arrive through a notification lifecycle (curtain,
unread, display) and become regular nodes once accepted.
"""
from .attention import AttentionScore, SamplerConfig, index_of_difficulty, sample, sample_primitive
from .engine import Engine, SchedulerConfig, execute_job, run_command
from .errors import PolymindError
from .llm import CompletionParams, MockProvider, RemoteChatProvider, Turn
from .model import (
    Document,
    DiagramNode,
    Edge,
    Event,
    GenerationResult,
    NodeKind,
    Phase,
    Section,
    TaskState,
    new_document,
    replay,
)
from .persistence import load, save
from .simulate import Session, TraceScript, simulate
from .tasks import Initiative, InputType, OutputType, PromptTemplate, TaskSpec, defaults

__all__ = [
    "AttentionScore",
    "CompletionParams",
    "DiagramNode",
    "Document",
    "Edge",
    "Engine",
    "Event",
    "GenerationResult",
    "Initiative",
    "InputType",
    "MockProvider",
    "NodeKind",
    "OutputType",
    "Phase",
    "PolymindError",
    "PromptTemplate",
    "RemoteChatProvider",
    "SamplerConfig",
    "SchedulerConfig",
    "Section",
    "Session",
    "TaskSpec",
    "TaskState",
    "TraceScript",
    "Turn",
    "defaults",
    "execute_job",
    "index_of_difficulty",
    "load",
    "new_document",
    "replay",
    "run_command",
    "sample",
    "sample_primitive",
    "save",
    "simulate",
]

__version__ = "0.1.0"
