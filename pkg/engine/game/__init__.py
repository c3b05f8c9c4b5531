# The session-driving modules (agents, match) import Backend.session_engine,
# which imports this package; they are loaded by their full path only.
from engine.game.moves import (
    MAX_MATCH_TURNS, Bijection, ExtensionRequest, Forfeit, GameConfig, GraphExit, GraphOpen, GraphResponse,
    GraphStep, Move, Pick, move_from_json,
)
from engine.game.oracle import ORACLE_MAX_ROUNDS, ORACLE_MAX_UNIVERSE, bijection_game_oracle
from engine.game.transcript import Transcript, TranscriptHeader, TranscriptLine, canonical_json, read_transcript, write_transcript
