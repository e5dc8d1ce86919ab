# Backend tests package 