"""Nooks: anonymous, topic-scoped, time-boxed group chats for workplaces."""

__version__ = "0.1.0"
