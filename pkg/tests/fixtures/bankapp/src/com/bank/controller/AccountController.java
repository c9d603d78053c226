package com.bank.controller;

import com.bank.model.Account;
import com.bank.repository.AccountRepository;

public class AccountController {
    private AccountRepository repository;

    public AccountController(AccountRepository repository) {
        this.repository = repository;
    }

    public Account getAccount(int id) {
        return (Account) repository.findById(id);
    }

    public void deposit(int id, double amount) {
        Account account = getAccount(id);
        double updated = account.getBalance() + amount;
        account.setBalance(updated);
        repository.save(account);
    }

    public void withdraw(int id, double amount) {
        Account account = getAccount(id);
        if (account.getBalance() >= amount) {
            account.setBalance(account.getBalance() - amount);
        }
        repository.save(account);
    }

    public void update(int id) {
        repository.save(getAccount(id));
    }

    public void transfer(int from, int to, double amount) {
        withdraw(from, amount);
        deposit(to, amount);
    }
}
